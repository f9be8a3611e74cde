use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use toposkit::category::{is_epi, is_epimorphic_family, is_iso, is_mono, ArrowFamily, FinCategory};
use toposkit::modules::FinRing;
use toposkit::presheaf::{
    colimit_of_representables_mod, colimit_of_representables_set, is_iso as is_iso_morphism, isomorphic,
    mod_nat_transformations, set_isomorphism,
    nat_module, set_nat_transformations, set_pointwise_colimit, set_pointwise_limit, yoneda_mod, yoneda_set,
    Presheaf, PresheafMorphism, SetPresheaf, SetPresheafDiagram,
};
use toposkit::random;
use toposkit::sheaf::{
    factor_through_unit, is_separated, is_sheaf, is_sheaf_on_basis, min_cover_agrees, plus_construction,
    sheafify,
};
use toposkit::site::{
    all_sieves, generate_topology, saturate, validate_basis, verify_topology, GrothendieckTopology, Sieve,
    SIEVE_CAP,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn site(r: &mut ChaCha8Rng) -> (Arc<FinCategory>, GrothendieckTopology) {
    let cat = Arc::new(random::category(r));
    let j = random::topology(r, &cat);
    (cat, j)
}

#[test]
fn sieve_and_basis_checkers_agree() {
    let mut r = rng(1);
    let (mut applicable, mut sheaves) = (0, 0);
    for _ in 0..400 {
        let cat = Arc::new(random::category(&mut r));
        let b = random::basis(&mut r, &cat);
        let p = random::set_presheaf(&mut r, &cat, 4);
        if !validate_basis(&b).unwrap().is_valid() {
            continue;
        }
        let j = generate_topology(&b).unwrap();
        if let Some(by_basis) = is_sheaf_on_basis(&p, &b) {
            applicable += 1;
            sheaves += usize::from(by_basis);
            assert_eq!(by_basis, is_sheaf(&p, &j), "{cat:?}\n{p:?}");
        }
    }
    assert!(applicable >= 100, "{applicable}");
    assert!(sheaves > 0 && sheaves < applicable);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn arrow_properties(seed in any::<u64>()) {
        let cat = random::category(&mut rng(seed));
        for f in cat.arrow_ids() {
            if is_iso(&cat, f) {
                prop_assert!(is_epi(&cat, f) && is_mono(&cat, f));
            }
            let fam = ArrowFamily::new(&cat, cat.target(f), vec![f]).unwrap();
            prop_assert_eq!(is_epimorphic_family(&cat, &fam), is_epi(&cat, f));
        }
    }

    #[test]
    fn generated_topologies(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (cat, j) = site(&mut r);
        prop_assert!(verify_topology(&j).is_empty());
        // generating from the covering sieves gives the same topology
        let again = saturate(&cat, j.sieves()).unwrap();
        prop_assert_eq!(again.sieves(), j.sieves());
        // a larger seed gives a finer topology
        let mut seeds = j.sieves();
        for c in cat.objects() {
            let all = all_sieves(&cat, c, SIEVE_CAP).unwrap();
            seeds[c.0].push(all[r.gen_range(0..all.len())].clone());
        }
        let finer = saturate(&cat, seeds).unwrap();
        prop_assert!(j.is_coarser_than(&finer));
        for c in cat.objects() {
            let covering: Vec<&Sieve> = j.covering(c).collect();
            for s in &covering {
                for t in &covering {
                    prop_assert!(j.covers(&s.intersection(t)));
                }
            }
        }
    }

    #[test]
    fn set_yoneda(seed in any::<u64>()) {
        let mut r = rng(seed);
        let cat = Arc::new(random::category(&mut r));
        let f = random::set_presheaf(&mut r, &cat, 4);
        for c in cat.objects() {
            let y = yoneda_set(&cat, c).unwrap();
            let id = cat.hom(c, c).iter().position(|&g| g == cat.identity(c)).unwrap();
            let nats = set_nat_transformations(&y, &f);
            let mut at_id: Vec<usize> = nats.iter().map(|g| g.apply(c, id)).collect();
            for g in &nats {
                for x in cat.objects() {
                    for (k, &u) in cat.hom(x, c).iter().enumerate() {
                        prop_assert_eq!(g.apply(x, k), f.restrict(u, g.apply(c, id)));
                    }
                }
            }
            at_id.sort();
            at_id.dedup();
            prop_assert_eq!(at_id.len(), nats.len());
            prop_assert_eq!(nats.len(), f.card(c));
        }
        for x in cat.objects() {
            for z in cat.objects() {
                let (yx, yz) = (yoneda_set(&cat, x).unwrap(), yoneda_set(&cat, z).unwrap());
                prop_assert_eq!(set_nat_transformations(&yx, &yz).len(), cat.hom(x, z).len());
            }
        }
    }

    #[test]
    fn mod_yoneda(seed in any::<u64>()) {
        let mut r = rng(seed);
        let cat = Arc::new(random::category(&mut r));
        let ring = FinRing::cyclic(r.gen_range(2..=3)).unwrap();
        let f = random::mod_presheaf(&mut r, &cat, &ring, 4);
        for c in cat.objects() {
            let y = yoneda_mod(&cat, &ring, c).unwrap();
            prop_assert_eq!(nat_module(&y, &f).unwrap().module.card(), f.card(c));
            prop_assert_eq!(mod_nat_transformations(&y, &f).len(), f.card(c));
        }
    }

    #[test]
    fn presheaves_are_colimits_of_representables(seed in any::<u64>()) {
        let mut r = rng(seed);
        let cat = Arc::new(random::category(&mut r));
        let f = random::set_presheaf(&mut r, &cat, 4);
        let c = colimit_of_representables_set(&f).unwrap();
        prop_assert!(c.is_iso && isomorphic(&c.colimit, &f));
        let ring = random::ring(&mut r).unwrap();
        let m = random::mod_presheaf(&mut r, &cat, &ring, 6);
        let c = colimit_of_representables_mod(&m).unwrap();
        prop_assert!(c.is_iso);
    }

    #[test]
    fn pointwise_colimits_and_limits(seed in any::<u64>()) {
        let mut r = rng(seed);
        let cat = Arc::new(random::category(&mut r));
        let f = random::set_presheaf(&mut r, &cat, 3);
        let g = random::set_presheaf(&mut r, &cat, 3);
        let nats = set_nat_transformations(&f, &g);
        let edges: Vec<_> = nats.iter().take(2).map(|m| (0, 1, m.clone())).collect();
        let d = SetPresheafDiagram { base: cat.clone(), nodes: vec![f.clone(), g.clone()], edges };
        let co = set_pointwise_colimit(&d).unwrap();
        let lim = set_pointwise_limit(&d).unwrap();
        for c in cat.objects() {
            // quotient of F(C) + G(C), computed at C alone
            let n = f.card(c) + g.card(c);
            let mut parent: Vec<usize> = (0..n).collect();
            fn root(p: &mut Vec<usize>, x: usize) -> usize {
                if p[x] == x { x } else { let r = root(p, p[x]); p[x] = r; r }
            }
            for (_, _, m) in &d.edges {
                for x in 0..f.card(c) {
                    let (a, b) = (root(&mut parent, x), root(&mut parent, f.card(c) + m.apply(c, x)));
                    parent[a] = b;
                }
            }
            let classes = (0..n).filter(|&x| root(&mut parent, x) == x).count();
            prop_assert_eq!(co.apex.card(c), classes);
            let pairs = (0..f.card(c))
                .flat_map(|x| (0..g.card(c)).map(move |y| (x, y)))
                .filter(|&(x, y)| d.edges.iter().all(|(_, _, m)| m.apply(c, x) == y))
                .count();
            prop_assert_eq!(lim.apex.card(c), pairs);
        }
    }

    #[test]
    fn isomorphism_search_matches_enumeration(seed in any::<u64>()) {
        let mut r = rng(seed);
        let cat = Arc::new(random::category(&mut r));
        let f = random::set_presheaf(&mut r, &cat, 3);
        let g = random::set_presheaf(&mut r, &cat, 3);
        for (p, q) in [(&f, &g), (&f, &f), (&g, &f)] {
            let brute = set_nat_transformations(p, q).into_iter().any(|m| is_iso_morphism(&m, p, q));
            let found = set_isomorphism(p, q);
            prop_assert_eq!(found.is_some(), brute);
            if let Some(m) = found {
                prop_assert!(is_iso_morphism(&m, p, q));
                prop_assert!(toposkit::presheaf::naturality_failure(&m, p, q).is_none());
            }
        }
    }

    #[test]
    fn sheafification(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (cat, j) = site(&mut r);
        let f = random::set_presheaf(&mut r, &cat, 3);
        let plus = plus_construction(&f, &j).unwrap();
        prop_assert!(is_separated(&plus.presheaf, &j));
        prop_assert!(min_cover_agrees(&f, &j, &plus));
        if is_separated(&f, &j) {
            prop_assert!(is_sheaf(&plus.presheaf, &j));
        }
        let unit_iso = toposkit::presheaf::is_iso(&plus.unit, &f, &plus.presheaf);
        prop_assert_eq!(unit_iso, is_sheaf(&f, &j));
        let a = sheafify(&f, &j).unwrap();
        prop_assert!(is_sheaf(&a.sheaf, &j));
        let aa = sheafify(&a.sheaf, &j).unwrap();
        prop_assert!(toposkit::presheaf::is_iso(&aa.unit, &a.sheaf, &aa.sheaf));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sheafification_is_a_left_exact_left_adjoint(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (cat, j) = site(&mut r);
        let f = random::set_presheaf(&mut r, &cat, 2);
        let h = random::set_presheaf(&mut r, &cat, 2);
        let g = sheafify(&h, &j).unwrap().sheaf;
        let a = sheafify(&f, &j).unwrap();
        let direct = set_nat_transformations(&f, &g);
        prop_assert_eq!(set_nat_transformations(&a.sheaf, &g).len(), direct.len());
        for phi in &direct {
            let psi = factor_through_unit(phi, &f, &g, &j).unwrap();
            prop_assert_eq!(&a.unit.then(&psi), phi);
        }
        let product = |x: &SetPresheaf, y: &SetPresheaf| {
            let d = SetPresheafDiagram { base: cat.clone(), nodes: vec![x.clone(), y.clone()], edges: vec![] };
            set_pointwise_limit(&d).unwrap().apex
        };
        let ah = sheafify(&h, &j).unwrap().sheaf;
        let left = sheafify(&product(&f, &h), &j).unwrap().sheaf;
        prop_assert!(isomorphic(&left, &product(&a.sheaf, &ah)));
    }
}

#[test]
fn empty_presheaf_is_a_sheaf_only_without_empty_covers() {
    let mut r = rng(3);
    for _ in 0..30 {
        let (cat, j) = site(&mut r);
        let e = SetPresheaf::empty(cat.clone());
        let empty_covers = cat.objects().any(|c| j.covers(&Sieve::empty(c)));
        assert_eq!(is_sheaf(&e, &j), !empty_covers);
    }
}

#[test]
fn oversized_materialization_is_refused_quickly() {
    use std::sync::atomic::AtomicBool;
    use toposkit::materialize::{materialize, Bounds};
    let cat = Arc::new(toposkit::category::fixtures::c2());
    let start = std::time::Instant::now();
    let err = materialize(&cat, Bounds::values(9), None, &AtomicBool::new(false)).unwrap_err();
    assert!(matches!(err, toposkit::Error::TooLarge(_)), "{err}");
    assert!(start.elapsed().as_secs() < 5);
}
