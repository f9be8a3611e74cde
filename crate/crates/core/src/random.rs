//! Seeded random instances for property tests: small categories, bases,
//! presheaves and module diagrams.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::category::fixtures::{c2, chain3, parallel_pair};
use crate::category::{cyclic_group, poset, ArrowFamily, ArrowId, FinCategory, ObjId};
use crate::error::Result;
use crate::modules::{hom_module, modules_up_to, FinModule, FinRing, ModDiagram, ModuleHom};
use crate::presheaf::{ModPresheaf, SetPresheaf};
use crate::site::{all_sieves, close_basis, saturate, Basis, GrothendieckTopology, Sieve, SIEVE_CAP};

const RETRIES: usize = 64;

/// A small category: a random poset, a cyclic group, or a fixture. At most
/// three objects and eight arrows.
pub fn category<R: Rng>(rng: &mut R) -> FinCategory {
    match rng.gen_range(0..6) {
        0 => c2(),
        1 => chain3(),
        2 => parallel_pair(),
        3 => cyclic_group(rng.gen_range(1..=4)).expect("cyclic group"),
        _ => {
            let n = rng.gen_range(1..=3);
            let edges: Vec<bool> = (0..n * n).map(|_| rng.gen_bool(0.5)).collect();
            let names = ["A", "B", "C"];
            poset(&names[..n], |i, j| i < j && edges[i * n + j]).expect("acyclic")
        }
    }
}

/// A basis generated by one random family per object, closed under the
/// basis clauses. Falls back to the identity families. Clause 2 may stay
/// unchecked where the category lacks pullbacks.
pub fn basis<R: Rng>(rng: &mut R, cat: &Arc<FinCategory>) -> Basis {
    let families: Vec<ArrowFamily> = cat
        .objects()
        .map(|c| {
            let into: Vec<ArrowId> = cat.arrows_into(c).to_vec();
            let mut arrows: Vec<ArrowId> = into.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
            if arrows.is_empty() && rng.gen_bool(0.7) {
                arrows.push(*into.choose(rng).expect("identity"));
            }
            ArrowFamily::new(cat, c, arrows).expect("arrows into c")
        })
        .collect();
    close_basis(cat.clone(), families).unwrap_or_else(|_| Basis::new(cat.clone(), Vec::new()).expect("identities"))
}

/// The topology generated by random seed sieves, one or two per object.
pub fn topology<R: Rng>(rng: &mut R, cat: &Arc<FinCategory>) -> GrothendieckTopology {
    let seeds: Vec<Vec<Sieve>> = cat
        .objects()
        .map(|c| {
            let all = all_sieves(cat, c, SIEVE_CAP).expect("small category");
            (0..rng.gen_range(1..=2)).map(|_| all.choose(rng).expect("maximal").clone()).collect()
        })
        .collect();
    saturate(cat, seeds).expect("small category")
}

/// Arrows from which every arrow is a composite, with one derivation
/// `f = g o h` per remaining non-identity arrow, in dependency order.
fn derivations(cat: &FinCategory) -> (Vec<ArrowId>, Vec<(ArrowId, ArrowId, ArrowId)>) {
    let mut known: HashMap<ArrowId, ()> = cat.objects().map(|c| (cat.identity(c), ())).collect();
    let mut gens = Vec::new();
    let mut steps = Vec::new();
    for f in cat.arrow_ids() {
        if known.contains_key(&f) {
            continue;
        }
        gens.push(f);
        known.insert(f, ());
        let mut queue: VecDeque<ArrowId> = known.keys().copied().collect();
        while let Some(a) = queue.pop_front() {
            let ks: Vec<ArrowId> = known.keys().copied().collect();
            for b in ks {
                for (g, h) in [(a, b), (b, a)] {
                    if let Some(c) = cat.compose(g, h) {
                        if !known.contains_key(&c) {
                            known.insert(c, ());
                            steps.push((c, g, h));
                            queue.push_back(c);
                        }
                    }
                }
            }
        }
    }
    (gens, steps)
}

/// A functorial presheaf with values of size at most `max_value`; the
/// terminal presheaf when no random attempt is functorial.
pub fn set_presheaf<R: Rng>(rng: &mut R, cat: &Arc<FinCategory>, max_value: usize) -> SetPresheaf {
    let (gens, steps) = derivations(cat);
    for _ in 0..RETRIES {
        let sizes: Vec<usize> = cat.objects().map(|_| rng.gen_range(0..=max_value)).collect();
        let values: Vec<Vec<String>> = sizes
            .iter()
            .enumerate()
            .map(|(c, &n)| (0..n).map(|k| format!("{}{k}", cat.object_name(ObjId(c)).to_lowercase())).collect())
            .collect();
        let mut tables: Vec<Vec<usize>> = cat.arrow_ids().map(|f| (0..sizes[cat.target(f).0]).collect()).collect();
        let mut possible = true;
        for &f in &gens {
            let (s, t) = (sizes[cat.source(f).0], sizes[cat.target(f).0]);
            if s == 0 && t > 0 {
                possible = false;
                break;
            }
            tables[f.0] = (0..t).map(|_| rng.gen_range(0..s)).collect();
        }
        if !possible {
            continue;
        }
        for &(c, g, h) in &steps {
            tables[c.0] = tables[g.0].iter().map(|&x| tables[h.0][x]).collect();
        }
        if let Ok(p) = SetPresheaf::new(cat.clone(), values, tables) {
            return p;
        }
    }
    SetPresheaf::terminal(cat.clone())
}

/// A uniformly random element of `Hom(m, n)`.
pub fn module_hom<R: Rng>(rng: &mut R, m: &FinModule, n: &FinModule) -> ModuleHom {
    let h = hom_module(m, n).expect("same ring");
    let x: Vec<u64> = h.module.factors().iter().map(|f| rng.gen_range(0..f.order)).collect();
    h.to_hom(&x)
}

/// A module with at most `max_elements` elements, chosen among iso classes.
pub fn module<R: Rng>(rng: &mut R, ring: &FinRing, max_elements: usize) -> FinModule {
    modules_up_to(ring, max_elements as u128).choose(rng).expect("zero module").clone()
}

/// A functorial module-valued presheaf; the zero presheaf when no random
/// attempt is functorial.
pub fn mod_presheaf<R: Rng>(rng: &mut R, cat: &Arc<FinCategory>, ring: &FinRing, max_elements: usize) -> ModPresheaf {
    let (gens, steps) = derivations(cat);
    let pool = modules_up_to(ring, max_elements as u128);
    for _ in 0..RETRIES {
        let values: Vec<FinModule> = cat.objects().map(|_| pool.choose(rng).expect("zero").clone()).collect();
        let mut maps: Vec<ModuleHom> = cat
            .arrow_ids()
            .map(|f| ModuleHom::zero(&values[cat.target(f).0], &values[cat.source(f).0]))
            .collect();
        for c in cat.objects() {
            maps[cat.identity(c).0] = ModuleHom::identity(&values[c.0]);
        }
        for &f in &gens {
            maps[f.0] = module_hom(rng, &values[cat.target(f).0], &values[cat.source(f).0]);
        }
        for &(c, g, h) in &steps {
            maps[c.0] = maps[h.0].compose(&maps[g.0]).expect("composable");
        }
        if let Ok(p) = ModPresheaf::new(cat.clone(), ring, values, maps) {
            return p;
        }
    }
    ModPresheaf::zero(cat.clone(), ring)
}

/// A diagram of up to `max_nodes` modules with random maps between them.
pub fn module_diagram<R: Rng>(rng: &mut R, ring: &FinRing, max_nodes: usize, max_elements: usize) -> ModDiagram {
    let pool = modules_up_to(ring, max_elements as u128);
    let n = rng.gen_range(1..=max_nodes);
    let nodes: Vec<FinModule> = (0..n).map(|_| pool.choose(rng).expect("zero").clone()).collect();
    let mut edges = Vec::new();
    for from in 0..n {
        for to in 0..n {
            if from != to && rng.gen_bool(0.4) {
                edges.push((from, to, module_hom(rng, &nodes[from], &nodes[to])));
            }
        }
    }
    ModDiagram { nodes, edges }
}

/// A random ring among `Z/2`, `Z/3`, `Z/4`, `Z/6` and `Z/2 x Z/3`.
pub fn ring<R: Rng>(rng: &mut R) -> Result<FinRing> {
    match rng.gen_range(0..5) {
        0 => FinRing::cyclic(2),
        1 => FinRing::cyclic(3),
        2 => FinRing::cyclic(4),
        3 => FinRing::cyclic(6),
        _ => FinRing::product(vec![2, 3]),
    }
}
