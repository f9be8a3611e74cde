use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AuditScope, Axiom, Outcome, Tally, Witness};
use crate::error::{Error, Result};
use crate::modules::{
    all_homs, cokernel, direct_sum, hom_module, image, mod_pullback, modules_up_to, ring_elements, submodules,
    Biproduct, FinModule, FinRing, ModuleHom,
};
use crate::presheaf::free_module_on;

/// Relation subobjects of `M + M` are enumerated in full up to this size.
const FULL_RELATION_LIMIT: usize = 64;

pub(super) struct ModuleSlice {
    ring: FinRing,
    mods: Vec<FinModule>,
    hom_cap: usize,
    fork_samples: usize,
    seed: u64,
}

fn witness(modules: &[&FinModule], maps: &[&ModuleHom]) -> Witness {
    Witness::Module {
        modules: modules.iter().map(|&m| m.clone()).collect(),
        maps: maps.iter().map(|&h| h.clone()).collect(),
    }
}

fn sum(a: &ModuleHom, b: &ModuleHom) -> ModuleHom {
    a.add(b).expect("parallel maps")
}

fn after(g: &ModuleHom, f: &ModuleHom) -> ModuleHom {
    g.compose(f).expect("composable maps")
}

fn sum2(m: &FinModule) -> Biproduct {
    direct_sum(m, m).expect("same ring")
}

/// `x -> (a(x), b(x))` into `A + B`.
fn pair(bp: &Biproduct, a: &ModuleHom, b: &ModuleHom) -> ModuleHom {
    sum(&after(&bp.injections[0], a), &after(&bp.injections[1], b))
}

fn subgroup_closure(m: &FinModule, elems: &BTreeSet<usize>, g: &[u64], scalars: &[Vec<u64>]) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for &x in elems {
        let x = m.decode(x);
        for r in scalars {
            out.insert(m.encode(&m.add(&x, &m.scale(r, g))));
        }
    }
    out
}

/// The inclusion of the submodule with the given elements.
fn inclusion_of(m: &FinModule, elems: &[usize]) -> ModuleHom {
    let scalars = ring_elements(m.ring());
    let mut span: BTreeSet<usize> = [m.encode(&m.zero_element())].into();
    let mut gens = Vec::new();
    for &x in elems {
        if !span.contains(&x) {
            let g = m.decode(x);
            span = subgroup_closure(m, &span, &g, &scalars);
            gens.push(g);
        }
    }
    let free = free_module_on(m.ring(), gens.len());
    let k = m.ring().num_components();
    let columns: Vec<_> = gens
        .iter()
        .flat_map(|g| (0..k).map(move |j| (j, g.clone())))
        .map(|(j, g)| {
            let e: Vec<u64> = (0..k).map(|c| u64::from(c == j)).collect();
            m.scale(&e, &g)
        })
        .collect();
    let h = ModuleHom::from_columns(&free, m, &columns).expect("columns lie in the module");
    image(&h).map
}

impl ModuleSlice {
    pub(super) fn new(ring: &FinRing, max_elements: usize, scope: &AuditScope) -> Self {
        ModuleSlice {
            ring: ring.clone(),
            mods: modules_up_to(ring, max_elements as u128),
            hom_cap: scope.hom_cap,
            fork_samples: scope.fork_samples,
            seed: scope.seed,
        }
    }

    pub(super) fn ring(&self) -> &FinRing {
        &self.ring
    }

    fn rng(&self, axiom: Axiom) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ (axiom as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    /// All of `Hom(m, n)` when it has at most `hom_cap` elements, otherwise
    /// a sample of that size; the flag is `true` when enumerated in full.
    fn homs(&self, m: &FinModule, n: &FinModule, rng: &mut ChaCha8Rng) -> (Vec<ModuleHom>, bool) {
        let h = hom_module(m, n).expect("same ring");
        if h.module.size() <= self.hom_cap as u128 {
            return (h.homs().collect(), true);
        }
        let sample = (0..self.hom_cap)
            .map(|_| {
                let x: Vec<u64> = h.module.factors().iter().map(|f| rng.gen_range(0..f.order)).collect();
                h.to_hom(&x)
            })
            .collect();
        (sample, false)
    }

    pub(super) fn coproduct_pair(&self, a: &FinModule, b: &FinModule, f: Option<&ModuleHom>) -> Outcome {
        let bp = direct_sum(a, b).expect("same ring");
        let Some(f) = f else {
            let p = mod_pullback(&bp.injections[0], &bp.injections[1]).expect("common codomain");
            return if p.module.is_zero() {
                Outcome::Pass
            } else {
                Outcome::Violation(format!("injections of {a} + {b} meet in {}", p.module))
            };
        };
        if f.codomain() != &bp.sum {
            return Outcome::Skip;
        }
        let p1 = mod_pullback(&bp.injections[0], f).expect("common codomain");
        let p2 = mod_pullback(&bp.injections[1], f).expect("common codomain");
        let c = direct_sum(&p1.module, &p2.module).expect("same ring");
        let k = sum(&after(&p1.p2, &c.projections[0]), &after(&p2.p2, &c.projections[1]));
        if k.is_iso() {
            Outcome::Pass
        } else {
            Outcome::Violation(format!("pulling {a} + {b} back along a map from {} is not a coproduct", f.domain()))
        }
    }

    pub(super) fn coproducts(&self, t: &mut Tally) {
        let mut rng = self.rng(Axiom::Coproducts);
        let bound = self.mods.last().map_or(1, |m| m.size());
        for (i, a) in self.mods.iter().enumerate() {
            for b in &self.mods[i..] {
                t.record(self.coproduct_pair(a, b, None), || witness(&[a, b], &[]));
                let s = direct_sum(a, b).expect("same ring").sum;
                if s.size() > bound {
                    continue;
                }
                for d in &self.mods {
                    let (fs, full) = self.homs(d, &s, &mut rng);
                    if !full {
                        t.sampled();
                    }
                    for f in &fs {
                        t.record(self.coproduct_pair(a, b, Some(f)), || witness(&[a, b], &[f]));
                    }
                }
            }
        }
        t.note("the zero module is initial and terminal, so disjointness holds literally but the initial object is not strict");
    }

    pub(super) fn epi_coequalizer_at(&self, f: &ModuleHom) -> Outcome {
        if !f.is_surjective() {
            return Outcome::Skip;
        }
        let kp = mod_pullback(f, f).expect("common codomain");
        let q = cokernel(&kp.p1.sub(&kp.p2).expect("parallel maps"));
        match f.descend_through(&q.map) {
            Some(k) if k.is_iso() => Outcome::Pass,
            _ => Outcome::Violation(format!(
                "epi {} -> {} is not the coequalizer of its kernel pair",
                f.domain(),
                f.codomain()
            )),
        }
    }

    pub(super) fn epi_coequalizer(&self, t: &mut Tally) {
        let mut rng = self.rng(Axiom::EpiCoequalizer);
        for m in &self.mods {
            for n in &self.mods {
                let (fs, full) = self.homs(m, n, &mut rng);
                if !full {
                    t.sampled();
                }
                for f in &fs {
                    t.record(self.epi_coequalizer_at(f), || witness(&[], &[f]));
                }
            }
        }
    }

    /// `iota: R -> M + M` as a relation on `M`.
    pub(super) fn equivalence_at(&self, m: &FinModule, iota: &ModuleHom) -> Outcome {
        let bp = sum2(m);
        if iota.codomain() != &bp.sum || !iota.is_injective() {
            return Outcome::Skip;
        }
        let (r1, r2) = (after(&bp.projections[0], iota), after(&bp.projections[1], iota));
        let id = ModuleHom::identity(m);
        let reflexive = pair(&bp, &id, &id).lift_through(iota).is_some();
        let symmetric = pair(&bp, &r2, &r1).lift_through(iota).is_some();
        let p = mod_pullback(&r2, &r1).expect("common codomain");
        let transitive = pair(&bp, &after(&r1, &p.p1), &after(&r2, &p.p2)).lift_through(iota).is_some();
        if !(reflexive && symmetric && transitive) {
            return Outcome::Skip;
        }
        let q = cokernel(&r1.sub(&r2).expect("parallel maps")).map;
        let kp = mod_pullback(&q, &q).expect("common codomain");
        match iota.lift_through(&pair(&bp, &kp.p1, &kp.p2)) {
            Some(k) if k.is_iso() => Outcome::Pass,
            _ => Outcome::Violation(format!(
                "equivalence relation of size {} on {m} is not the kernel pair of its quotient",
                iota.domain().card()
            )),
        }
    }

    pub(super) fn equivalence_relations(&self, t: &mut Tally) {
        for m in &self.mods {
            let bp = sum2(m);
            let relations: Vec<Vec<usize>> = if bp.sum.card() <= FULL_RELATION_LIMIT {
                submodules(&bp.sum)
            } else {
                // every equivalence relation is {(x, y) : x - y in N}
                submodules(m)
                    .into_iter()
                    .map(|n| {
                        let mut r: Vec<usize> = m
                            .elements()
                            .flat_map(|x| {
                                let bp = &bp;
                                n.iter().map(move |&k| {
                                    let y = m.sub(&x, &m.decode(k));
                                    bp.sum.encode(&bp.sum.add(&bp.injections[0].apply(&x), &bp.injections[1].apply(&y)))
                                })
                            })
                            .collect();
                        r.sort();
                        r.dedup();
                        r
                    })
                    .collect()
            };
            for r in relations {
                let iota = inclusion_of(&bp.sum, &r);
                t.record(self.equivalence_at(m, &iota), || witness(&[m], &[&iota]));
            }
        }
    }

    /// Pulls the exact fork `R => E -> Q` on `q` back along `g: Q' -> Q`
    /// and checks the result is exact.
    pub(super) fn exact_fork_at(&self, q: &ModuleHom, g: &ModuleHom) -> Outcome {
        if g.codomain() != q.codomain() || self.epi_coequalizer_at(q) != Outcome::Pass {
            return Outcome::Skip;
        }
        let e = q.domain();
        let kp = mod_pullback(q, q).expect("common codomain");
        let (r1, r2) = (&kp.p1, &kp.p2);
        // E' = E x_Q Q' and R' = R x_Q Q'
        let ep = mod_pullback(q, g).expect("common codomain");
        let rp = mod_pullback(&after(q, r1), g).expect("common codomain");
        let into_e = direct_sum(e, g.domain()).expect("same ring");
        let j = pair(&into_e, &ep.p1, &ep.p2);
        let lift = |r: &ModuleHom| pair(&into_e, &after(r, &rp.p1), &rp.p2).lift_through(&j);
        let (Some(s1), Some(s2)) = (lift(r1), lift(r2)) else {
            return Outcome::Violation("pulled-back relation does not land in the pulled-back object".into());
        };
        let qp = &ep.p2;
        let coeq = cokernel(&s1.sub(&s2).expect("parallel maps"));
        let coequalizes = matches!(qp.descend_through(&coeq.map), Some(k) if k.is_iso());
        let kpp = mod_pullback(qp, qp).expect("common codomain");
        let into_kp = pair(&direct_sum(&ep.module, &ep.module).expect("same ring"), &s1, &s2);
        let jk = pair(&direct_sum(&ep.module, &ep.module).expect("same ring"), &kpp.p1, &kpp.p2);
        let is_kernel_pair = matches!(into_kp.lift_through(&jk), Some(k) if k.is_iso());
        if coequalizes && is_kernel_pair {
            Outcome::Pass
        } else {
            Outcome::Violation(format!(
                "fork on {e} -> {} is not exact after pulling back along a map from {}",
                q.codomain(),
                g.domain()
            ))
        }
    }

    pub(super) fn exact_forks(&self, t: &mut Tally) {
        let mut rng = self.rng(Axiom::ExactForks);
        let mut forks = Vec::new();
        for m in &self.mods {
            for n in &self.mods {
                let (fs, full) = self.homs(m, n, &mut rng);
                if !full {
                    t.sampled();
                }
                forks.extend(fs.into_iter().filter(|f| self.epi_coequalizer_at(f) == Outcome::Pass));
            }
        }
        if forks.len() > self.fork_samples {
            forks.shuffle(&mut rng);
            forks.truncate(self.fork_samples);
            t.sampled();
        }
        for q in &forks {
            for qp in &self.mods {
                let (gs, full) = self.homs(qp, q.codomain(), &mut rng);
                if !full {
                    t.sampled();
                }
                for g in &gs {
                    t.record(self.exact_fork_at(q, g), || witness(&[], &[q, g]));
                }
            }
        }
    }

    fn separated(&self, gens: &[FinModule], u: &ModuleHom, v: &ModuleHom) -> Outcome {
        if u == v || u.domain() != v.domain() || u.codomain() != v.codomain() {
            return Outcome::Skip;
        }
        let m = u.domain();
        if gens.iter().any(|g| all_homs(g, m).iter().any(|x| after(u, x) != after(v, x))) {
            Outcome::Pass
        } else {
            Outcome::Violation(format!("two maps {m} -> {} are not separated", u.codomain()))
        }
    }

    pub(super) fn generators(&self, gens: &[FinModule], t: &mut Tally) {
        if gens.iter().any(|g| g.ring() != &self.ring) {
            t.record(Outcome::Hypothesis("generator over a different ring".into()), || witness(&[], &[]));
            return;
        }
        let mut rng = self.rng(Axiom::Generators);
        for m in &self.mods {
            for n in &self.mods {
                let (hs, full) = self.homs(m, n, &mut rng);
                if !full {
                    t.sampled();
                }
                let pairs = hs.iter().zip(hs.iter().skip(1)).chain(hs.iter().skip(1).map(|u| (u, &hs[0])));
                for (u, v) in pairs {
                    t.record(self.separated(gens, u, v), || witness(&gens.iter().collect::<Vec<_>>(), &[u, v]));
                }
            }
        }
    }

    pub(super) fn replay(&self, axiom: Axiom, modules: &[FinModule], maps: &[ModuleHom]) -> Result<Outcome> {
        let bad = || Error::Mismatch(format!("malformed witness for {axiom}"));
        Ok(match (axiom, modules, maps) {
            (Axiom::Coproducts, [a, b], []) => self.coproduct_pair(a, b, None),
            (Axiom::Coproducts, [a, b], [f]) => self.coproduct_pair(a, b, Some(f)),
            (Axiom::EpiCoequalizer, [], [f]) => self.epi_coequalizer_at(f),
            (Axiom::EquivalenceRelations, [m], [iota]) => self.equivalence_at(m, iota),
            (Axiom::ExactForks, [], [q, g]) => self.exact_fork_at(q, g),
            (Axiom::Generators, gens, [u, v]) => self.separated(gens, u, v),
            _ => return Err(bad()),
        })
    }
}
