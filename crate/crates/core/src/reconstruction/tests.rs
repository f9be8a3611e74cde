use std::sync::atomic::AtomicBool;

use super::*;
use crate::category::fixtures::{c2, chain3};
use crate::materialize::{materialize, Bounds, BoundedPresheafCategory};
use crate::presheaf::yoneda_set;
use crate::site::fixtures::j2;

fn psh(base: FinCategory, bound: usize) -> BoundedPresheafCategory {
    materialize(&Arc::new(base), Bounds::values(bound), None, &AtomicBool::new(false)).unwrap()
}

/// The representables of the base, as objects of the materialized ambient.
fn representables(m: &BoundedPresheafCategory) -> Vec<ObjId> {
    m.base.objects().map(|c| m.locate(&yoneda_set(&m.base, c).unwrap()).unwrap().0).collect()
}

#[test]
fn c2_as_its_own_site() {
    let cat = Arc::new(c2());
    let ctx = build_site(&cat, &[ObjId(0), ObjId(1)]).unwrap();
    assert!(ctx.basis_report.is_valid());
    assert_eq!(ctx.site.num_objects(), 2);
    let tally = embedding_tally(&ctx).unwrap();
    assert!(tally.full && tally.faithful);
    // Hom(-, U) has nothing over V, so the empty family over V makes it fail
    let reports = objects_are_sheaves(&ctx).unwrap();
    assert!(reports.iter().any(|r| r.witness.is_some()));
}

#[test]
fn objects_of_bounded_presheaf_categories_are_sheaves() {
    for m in [psh(c2(), 2), psh(chain3(), 2)] {
        let gens = representables(&m);
        let ctx = build_site(&m.category, &gens).unwrap();
        assert!(ctx.basis_report.is_valid(), "{}", ctx.basis_report);
        for r in objects_are_sheaves(&ctx).unwrap() {
            assert!(r.witness.is_none(), "{} is not a sheaf", r.name);
        }
        let tally = embedding_tally(&ctx).unwrap();
        assert!(tally.full && tally.faithful, "{:?}", tally.failures);
    }
}

#[test]
fn set_tensor_and_adjunction_in_psh_c2() {
    let m = psh(c2(), 2);
    let gens = representables(&m);
    let ctx = build_site(&m.category, &gens).unwrap();
    for e in m.category.objects() {
        let hat = restricted_yoneda(&ctx, e).unwrap();
        let t = tensor_with_a(&ctx, &hat).unwrap().expect("tensor exists");
        assert_ne!(t.presentation_agrees, Some(false));
        let report = set_counit_check(&ctx, e).unwrap();
        assert!(report.iso);
        assert_eq!(set_unit_check(&ctx, &hat).unwrap(), Some(true));
        for e2 in m.category.objects() {
            let adj = set_adjunction_check(&ctx, &hat, e2).unwrap().unwrap();
            assert!(adj.holds(), "{adj:?}");
        }
    }
}

#[test]
fn tensor_presentation_of_a_representable() {
    let m = psh(c2(), 2);
    let gens = representables(&m);
    let ctx = build_site(&m.category, &gens).unwrap();
    let hat = restricted_yoneda(&ctx, gens[1]).unwrap();
    let t = tensor_with_a(&ctx, &hat).unwrap().unwrap();
    assert_eq!(t.elements.len(), hat.card(ObjId(0)) + hat.card(ObjId(1)));
    assert_eq!(t.presentation_agrees, Some(true));
    assert_eq!(t.object, gens[1]);
    // the largest object needs a coproduct beyond the bound
    let big = restricted_yoneda(&ctx, m.category.objects().last().unwrap()).unwrap();
    assert_eq!(tensor_with_a(&ctx, &big).unwrap().unwrap().presentation_agrees, None);
}

mod linear {
    use super::*;
    use crate::modules::{FinModule, ModuleHom};
    use crate::presheaf::{yoneda_mod, ModMorphism};
    use crate::sheaf::is_sheaf;

    fn z(n: u64) -> FinRing {
        FinRing::cyclic(n).unwrap()
    }

    /// `G(V) -> G(U)` over C2 with the given matrix.
    fn on_c2(cat: &Arc<FinCategory>, ring: &FinRing, gv: &FinModule, gu: &FinModule, h: ModuleHom) -> ModPresheaf {
        let (u, v) = (cat.object_by_name("U").unwrap(), cat.object_by_name("V").unwrap());
        let mut restrictions = vec![ModuleHom::identity(gu); cat.num_arrows()];
        restrictions[cat.arrow_by_name("i").unwrap().0] = h;
        restrictions[cat.identity(v).0] = ModuleHom::identity(gv);
        let mut values = vec![gu.clone(); 2];
        values[v.0] = gv.clone();
        values[u.0] = gu.clone();
        ModPresheaf::new(cat.clone(), ring, values, restrictions).unwrap()
    }

    fn samples(cat: &Arc<FinCategory>, ring: &FinRing) -> Vec<ModPresheaf> {
        let m = FinModule::new(ring, &[2]).unwrap();
        let zero = FinModule::new(ring, &[]).unwrap();
        vec![
            on_c2(cat, ring, &m, &m, ModuleHom::identity(&m)),
            on_c2(cat, ring, &m, &m, ModuleHom::zero(&m, &m)),
            on_c2(cat, ring, &m, &zero, ModuleHom::zero(&m, &zero)),
            on_c2(cat, ring, &zero, &m, ModuleHom::zero(&zero, &m)),
            ModPresheaf::zero(cat.clone(), ring),
        ]
    }

    #[test]
    fn presheaf_adjunction_on_c2() {
        let cat = Arc::new(c2());
        let ring = z(2);
        let site = LinearSite::presheaves(cat.clone(), ring.clone());
        let fs = samples(&cat, &ring);
        for f in &fs {
            assert!(site.tensor_paths_agree(f).unwrap());
            assert!(site.unit_check(f).unwrap());
            assert!(site.counit_check(f).unwrap());
            for e in &fs {
                let r = site.adjunction_check(f, e).unwrap();
                assert!(r.holds(), "{r:?}");
            }
        }
        for c in cat.objects() {
            assert!(site.tensor_unit_check(c).unwrap());
        }
    }

    #[test]
    fn sheaf_adjunction_on_j2() {
        let (cat, j) = j2();
        let ring = z(2);
        let site = LinearSite::new(ring.clone(), j.clone());
        let fs = samples(&cat, &ring);
        let sheaves: Vec<&ModPresheaf> = fs.iter().filter(|e| is_sheaf(*e, &j)).collect();
        assert_eq!(sheaves.len(), 2);
        for f in &fs {
            for e in &sheaves {
                let r = site.adjunction_check(f, e).unwrap();
                assert!(r.holds(), "{r:?}");
            }
            // the unit is an isomorphism exactly on sheaves
            assert_eq!(site.unit_check(f).unwrap(), is_sheaf(f, &j));
        }
        for e in &sheaves {
            assert!(site.counit_check(e).unwrap());
        }
        for c in cat.objects() {
            assert!(site.tensor_unit_check(c).unwrap());
        }
        let r = coproduct_check(&site, sheaves[0], sheaves[1]).unwrap();
        assert_eq!(r, CoproductReport { iso: true, mono: true, epi: true });
        assert!(site.adjunction_check(&fs[1], &fs[1]).is_err());
    }

    #[test]
    fn naturality_on_c2() {
        let cat = Arc::new(c2());
        let ring = z(2);
        let site = LinearSite::presheaves(cat.clone(), ring.clone());
        let fs = samples(&cat, &ring);
        let e = &fs[0];
        for f1 in &fs {
            for f in &fs[..2] {
                for a in f1.nat_transformations(f) {
                    assert!(site.naturality_in_f(&a, f1, f, e).unwrap());
                }
            }
        }
        let f = &fs[1];
        for e2 in &fs {
            for b in e.nat_transformations(e2).into_iter().take(4) {
                assert!(site.naturality_in_e(f, &b, e, e2).unwrap());
            }
        }
    }

    #[test]
    fn hom_functor_on_generators() {
        let (cat, j) = j2();
        let ring = z(4);
        let site = LinearSite::new(ring.clone(), j);
        let v = cat.object_by_name("V").unwrap();
        let av = site.generator(v).unwrap();
        let r = site.hom_functor(&av).unwrap();
        // Nat(y C, E) = E(C)
        for c in cat.objects() {
            assert_eq!(r.presheaf.value(c).card(), av.value(c).card());
        }
        let y = yoneda_mod(&cat, &ring, v).unwrap();
        let id = ModMorphism::new(cat.objects().map(|c| ModuleHom::identity(y.value(c))).collect());
        assert_eq!(id, y.identity_morphism());
    }
}
