use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use toposkit::modules::{
    colimit, hom_preserves_limit, hom_turns_colimit_into_limit, image, kernel, limit, FinModule, FinRing,
    ModDiagram, ModuleHom,
};
use toposkit::random;

type Elem = Vec<u64>;

fn times(m: &FinModule, k: u64, x: &[u64]) -> Elem {
    m.normalize(&x.iter().map(|&v| v as i128 * k as i128).collect::<Vec<_>>())
}

/// Homs `m -> n` as images of the cyclic generators, each killed by its order.
fn brute_homs(m: &FinModule, n: &FinModule) -> Vec<Vec<Elem>> {
    let mut out: Vec<Vec<Elem>> = vec![vec![]];
    for f in m.factors() {
        let ok: Vec<Elem> = n.elements().filter(|y| times(n, f.order, y) == n.zero_element()).collect();
        out = out
            .into_iter()
            .flat_map(|pre| {
                ok.iter().map(move |y| {
                    let mut v = pre.clone();
                    v.push(y.clone());
                    v
                })
            })
            .collect();
    }
    out
}

fn apply(n: &FinModule, gens: &[Elem], x: &[u64]) -> Elem {
    let mut out = n.zero_element();
    for (xi, g) in x.iter().zip(gens) {
        out = n.add(&out, &times(n, *xi, g));
    }
    out
}

fn product_size(d: &ModDiagram) -> usize {
    d.nodes.iter().map(|n| n.card()).product()
}

/// Tuples of elements compatible with every edge.
fn brute_limit_card(d: &ModDiagram) -> usize {
    let mut tuples: Vec<Vec<Elem>> = vec![vec![]];
    for n in &d.nodes {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                n.elements().map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    tuples
        .iter()
        .filter(|t| d.edges.iter().all(|(a, b, h)| h.apply(&t[*a]) == t[*b]))
        .count()
}

/// Cardinality of the direct sum modulo the span of `in_b(h x) - in_a(x)`.
fn brute_colimit_card(d: &ModDiagram) -> usize {
    let offsets: Vec<usize> = d
        .nodes
        .iter()
        .scan(0, |acc, n| {
            let o = *acc;
            *acc += n.rank();
            Some(o)
        })
        .collect();
    let width: usize = d.nodes.iter().map(|n| n.rank()).sum();
    let orders: Vec<u64> = d.nodes.iter().flat_map(|n| n.orders()).collect();
    let reduce = |v: Vec<i128>| -> Elem {
        v.iter().zip(&orders).map(|(x, o)| x.rem_euclid(*o as i128) as u64).collect()
    };
    let mut rels = Vec::new();
    for (a, b, h) in &d.edges {
        for x in d.nodes[*a].elements() {
            let mut v = vec![0i128; width];
            for (i, c) in x.iter().enumerate() {
                v[offsets[*a] + i] -= *c as i128;
            }
            for (i, c) in h.apply(&x).iter().enumerate() {
                v[offsets[*b] + i] += *c as i128;
            }
            rels.push(reduce(v));
        }
    }
    let mut span = std::collections::HashSet::new();
    let mut frontier = vec![vec![0u64; width]];
    span.insert(vec![0u64; width]);
    while let Some(s) = frontier.pop() {
        for r in &rels {
            let t = reduce(s.iter().zip(r).map(|(a, b)| *a as i128 + *b as i128).collect());
            if span.insert(t.clone()) {
                frontier.push(t);
            }
        }
    }
    product_size(d) / span.len()
}

/// Cones from `e` over `d`, counted by brute force on generator images.
fn brute_cones(e: &FinModule, d: &ModDiagram) -> usize {
    let homs: Vec<Vec<Vec<Elem>>> = d.nodes.iter().map(|n| brute_homs(e, n)).collect();
    let gens: Vec<Elem> = (0..e.rank())
        .map(|i| (0..e.rank()).map(|j| u64::from(i == j)).collect())
        .collect();
    let mut count = 0;
    let mut idx = vec![0usize; homs.len()];
    loop {
        let ok = d.edges.iter().all(|(a, b, h)| {
            gens.iter().all(|g| {
                let ha = apply(&d.nodes[*a], &homs[*a][idx[*a]], g);
                h.apply(&ha) == apply(&d.nodes[*b], &homs[*b][idx[*b]], g)
            })
        });
        count += usize::from(ok);
        let mut k = 0;
        loop {
            if k == idx.len() {
                return count;
            }
            idx[k] += 1;
            if idx[k] < homs[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

fn instance(seed: u64, max_nodes: usize, max_elements: usize) -> (FinRing, ModDiagram, FinModule) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ring = random::ring(&mut rng).unwrap();
    let d = random::module_diagram(&mut rng, &ring, max_nodes, max_elements);
    let e = random::module(&mut rng, &ring, max_elements);
    (ring, d, e)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn limits_and_colimits_have_the_right_size(seed in any::<u64>()) {
        let (ring, d, _) = instance(seed, 3, 8);
        let l = limit(&ring, &d).unwrap();
        prop_assert_eq!(l.module.card(), brute_limit_card(&d));
        let c = colimit(&ring, &d).unwrap();
        prop_assert_eq!(c.module.card(), brute_colimit_card(&d));
        for (a, b, h) in &d.edges {
            prop_assert_eq!(h.compose(&l.legs[*a]).unwrap(), l.legs[*b].clone());
            prop_assert_eq!(c.legs[*b].compose(h).unwrap(), c.legs[*a].clone());
        }
    }

    #[test]
    fn hom_preserves_limits(seed in any::<u64>()) {
        let (ring, d, e) = instance(seed, 3, 4);
        prop_assert!(hom_preserves_limit(&e, &d).unwrap());
        prop_assert!(hom_turns_colimit_into_limit(&d, &e).unwrap());
        let l = limit(&ring, &d).unwrap();
        prop_assert_eq!(brute_homs(&e, &l.module).len(), brute_cones(&e, &d));
    }

    #[test]
    fn first_isomorphism_theorem(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ring = random::ring(&mut rng).unwrap();
        let m = random::module(&mut rng, &ring, 16);
        let n = random::module(&mut rng, &ring, 16);
        let h = random::module_hom(&mut rng, &m, &n);
        let k = kernel(&h);
        let im = image(&h);
        prop_assert_eq!(k.module.card() * im.module.card(), m.card());
        prop_assert!(h.compose(&k.map).unwrap().is_zero());
        prop_assert!(k.map.is_injective() && im.map.is_injective());
        let q = toposkit::modules::cokernel(&k.map);
        let induced = h.descend_through(&q.map).unwrap().lift_through(&im.map).unwrap();
        prop_assert!(induced.is_iso());
    }

    #[test]
    fn biproduct_laws(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ring = random::ring(&mut rng).unwrap();
        let mods: Vec<FinModule> = (0..3).map(|_| random::module(&mut rng, &ring, 8)).collect();
        let b = toposkit::modules::direct_sum_many(&ring, &mods).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let pi = b.projections[i].compose(&b.injections[j]).unwrap();
                if i == j {
                    prop_assert_eq!(pi, ModuleHom::identity(&mods[i]));
                } else {
                    prop_assert!(pi.is_zero());
                }
            }
        }
    }
}

#[test]
fn twenty_fixed_diagrams() {
    let mut passed = 0;
    for seed in 0..20 {
        let (_, d, e) = instance(seed, 3, 4);
        if hom_preserves_limit(&e, &d).unwrap() && hom_turns_colimit_into_limit(&d, &e).unwrap() {
            passed += 1;
        }
    }
    assert_eq!(passed, 20);
}

#[test]
fn generated_diagrams_are_not_trivial() {
    let sizes: Vec<(usize, usize, usize)> = (0..20)
        .map(|seed| {
            let (_, d, e) = instance(seed, 3, 4);
            (d.edges.len(), product_size(&d), e.card())
        })
        .collect();
    assert!(sizes.iter().filter(|s| s.0 > 0 && s.1 > 1 && s.2 > 1).count() >= 5);
}
