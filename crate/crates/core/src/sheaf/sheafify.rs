use super::plus::{Plus, SheafFlavor};
use super::{is_locally_surjective, is_sheaf, sheaf_witness};
use crate::error::{Error, Result};
use crate::modules::ModuleHom;
use crate::presheaf::{
    mod_pointwise_colimit, set_pointwise_colimit, ModMorphism, ModPresheaf, ModPresheafDiagram,
    Presheaf, PresheafMorphism, SetMorphism, SetPresheaf, SetPresheafDiagram,
};
use crate::site::GrothendieckTopology;

/// `aF = (F+)+` with the composite unit and both plus stages.
#[derive(Clone, Debug)]
pub struct Sheafified<P: Presheaf> {
    pub sheaf: P,
    pub unit: P::Morphism,
    pub first: Plus<P>,
    pub second: Plus<P>,
}

pub fn sheafify<P: SheafFlavor>(p: &P, j: &GrothendieckTopology) -> Result<Sheafified<P>> {
    let first = p.plus(j)?;
    let second = first.presheaf.plus(j)?;
    if let Some(w) = sheaf_witness(&second.presheaf, j) {
        return Err(Error::Internal(format!(
            "double plus is not a sheaf at {}",
            j.base().object_name(w.object)
        )));
    }
    Ok(Sheafified {
        sheaf: second.presheaf.clone(),
        unit: first.unit.then(&second.unit),
        first,
        second,
    })
}

/// The unique `psi: aF -> G` with `psi o unit = phi`, found by enumerating
/// `Nat(aF, G)`.
pub fn factor_through_unit<P: SheafFlavor>(
    phi: &P::Morphism,
    src: &P,
    tgt: &P,
    j: &GrothendieckTopology,
) -> Result<P::Morphism> {
    if !is_sheaf(tgt, j) {
        return Err(Error::Mismatch("target of the map is not a sheaf".into()));
    }
    let a = sheafify(src, j)?;
    let mut found: Vec<P::Morphism> = a
        .sheaf
        .nat_transformations(tgt)
        .into_iter()
        .filter(|psi| a.unit.then(psi) == *phi)
        .collect();
    match found.len() {
        1 => Ok(found.pop().expect("one")),
        0 => Err(Error::Internal("no factorization through the unit".into())),
        n => Err(Error::Internal(format!(
            "{n} factorizations through the unit"
        ))),
    }
}

/// `a(m): aP -> aQ`, the factorization of `P -> Q -> aQ` through the unit.
pub fn sheafify_map<P: SheafFlavor>(m: &P::Morphism, src: &P, tgt: &P, j: &GrothendieckTopology) -> Result<P::Morphism> {
    let b = sheafify(tgt, j)?;
    factor_through_unit(&m.then(&b.unit), src, &b.sheaf, j)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EpiReport {
    pub epi: bool,
    pub locally_surjective: bool,
}

/// Epi in sheaves, with local surjectivity alongside.
pub fn sheaf_epi_check<P: SheafFlavor>(
    phi: &P::Morphism,
    src: &P,
    tgt: &P,
    j: &GrothendieckTopology,
) -> Result<EpiReport> {
    if !is_sheaf(src, j) || !is_sheaf(tgt, j) {
        return Err(Error::Mismatch(
            "epi check needs both ends to be sheaves".into(),
        ));
    }
    let epi = P::epi_in_sheaves(phi, src, tgt, j)?;
    let locally_surjective = is_locally_surjective(phi, src, tgt, j);
    Ok(EpiReport {
        epi,
        locally_surjective,
    })
}

/// Tests `phi` against the sheafified cokernel pair `a(G +_F G)`: every
/// parallel pair out of `G` into that sheaf which agrees after `phi` must
/// be equal.
pub(crate) fn set_epi(
    phi: &SetMorphism,
    src: &SetPresheaf,
    tgt: &SetPresheaf,
    j: &GrothendieckTopology,
) -> Result<bool> {
    let d = SetPresheafDiagram {
        base: tgt.base().clone(),
        nodes: vec![src.clone(), tgt.clone(), tgt.clone()],
        edges: vec![(0, 1, phi.clone()), (0, 2, phi.clone())],
    };
    let pushout = set_pointwise_colimit(&d)?;
    let a = sheafify(&pushout.apex, j)?;
    let left = pushout.legs[1].then(&a.unit);
    let right = pushout.legs[2].then(&a.unit);
    let maps = tgt.nat_transformations(&a.sheaf);
    let after: Vec<SetMorphism> = maps.iter().map(|psi| phi.then(psi)).collect();
    let separated = (0..maps.len())
        .all(|x| (0..maps.len()).all(|y| after[x] != after[y] || maps[x] == maps[y]));
    if separated != (left == right) {
        return Err(Error::Internal(
            "cokernel-pair test disagrees with enumeration".into(),
        ));
    }
    Ok(separated)
}

/// `phi` is epi in sheaves iff the sheafified cokernel vanishes; checked
/// again by enumerating maps out of `G` that kill `phi`.
pub(crate) fn mod_epi(
    phi: &ModMorphism,
    src: &ModPresheaf,
    tgt: &ModPresheaf,
    j: &GrothendieckTopology,
) -> Result<bool> {
    let cat = tgt.base();
    let zero = ModMorphism::new(
        cat.objects()
            .map(|c| ModuleHom::zero(src.value(c), tgt.value(c)))
            .collect(),
    );
    let d = ModPresheafDiagram {
        base: cat.clone(),
        ring: tgt.ring().clone(),
        nodes: vec![src.clone(), tgt.clone()],
        edges: vec![(0, 1, phi.clone()), (0, 1, zero)],
    };
    let coker = mod_pointwise_colimit(&d)?;
    let a = sheafify(&coker.apex, j)?;
    let vanishes = cat.objects().all(|c| a.sheaf.value(c).is_zero());
    let killing_only_zero = tgt
        .nat_transformations(&a.sheaf)
        .iter()
        .filter(|psi| phi.then(psi).is_zero())
        .all(|psi| psi.is_zero());
    if vanishes != killing_only_zero {
        return Err(Error::Internal(
            "cokernel test disagrees with enumeration".into(),
        ));
    }
    Ok(vanishes)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::super::plus::min_cover_agrees;
    use super::super::tests::f_c2;
    use super::super::{is_separated, plus_construction};
    use super::*;
    use crate::category::FinCategory;
    use crate::modules::{FinModule, FinRing};
    use crate::presheaf::{is_iso, isomorphic, set_pointwise_limit, yoneda_mod, yoneda_set};
    use crate::site::fixtures::j2;

    fn g_mod(cat: &Arc<FinCategory>, ring: &FinRing) -> ModPresheaf {
        let v = cat.object_by_name("V").unwrap();
        let values: Vec<FinModule> = cat
            .objects()
            .map(|c| {
                if c == v {
                    FinModule::new(ring, &[2]).unwrap()
                } else {
                    FinModule::zero(ring)
                }
            })
            .collect();
        let restrictions = cat
            .arrow_ids()
            .map(|f| ModuleHom::zero(&values[cat.target(f).0], &values[cat.source(f).0]))
            .map(|h| {
                if h.domain() == h.codomain() {
                    ModuleHom::identity(h.domain())
                } else {
                    h
                }
            })
            .collect();
        ModPresheaf::new(cat.clone(), ring, values, restrictions).unwrap()
    }

    #[test]
    fn plus_of_f() {
        let (cat, j) = j2();
        let f = f_c2(&cat);
        let (u, v) = (
            cat.object_by_name("U").unwrap(),
            cat.object_by_name("V").unwrap(),
        );
        let i = cat.arrow_by_name("i").unwrap();
        let p = plus_construction(&f, &j).unwrap();
        assert_eq!(p.presheaf.values(v), ["a", "b"]);
        assert_eq!(p.presheaf.values(u), ["a", "b"]);
        assert_eq!(p.presheaf.restriction(i), [0, 1]);
        assert!(is_sheaf(&p.presheaf, &j));
        assert!(min_cover_agrees(&f, &j, &p));
        assert_eq!(p.unit.components[v.0], [0]);

        let a = sheafify(&f, &j).unwrap();
        assert!(isomorphic(&a.sheaf, &p.presheaf));
        assert!(is_iso(&a.second.unit, &p.presheaf, &a.sheaf));
    }

    #[test]
    fn plus_of_mod_presheaves() {
        let (cat, j) = j2();
        let ring = FinRing::cyclic(2).unwrap();
        let g = g_mod(&cat, &ring);
        let p = plus_construction(&g, &j).unwrap();
        assert!(cat.objects().all(|c| p.presheaf.value(c).is_zero()));
        assert!(min_cover_agrees(&g, &j, &p));

        let zero = ModPresheaf::zero(cat.clone(), &ring);
        let a = sheafify(&zero, &j).unwrap();
        assert!(cat.objects().all(|c| a.sheaf.value(c).is_zero()));

        let v = cat.object_by_name("V").unwrap();
        let y = yoneda_mod(&cat, &FinRing::cyclic(4).unwrap(), v).unwrap();
        let a = sheafify(&y, &j).unwrap();
        assert!(is_iso(&a.unit, &y, &a.sheaf));
    }

    #[test]
    fn sheaves_have_iso_units() {
        let (cat, j) = j2();
        let f = f_c2(&cat);
        for c in cat.objects() {
            let y = yoneda_set(&cat, c).unwrap();
            let p = plus_construction(&y, &j).unwrap();
            assert_eq!(is_sheaf(&y, &j), is_iso(&p.unit, &y, &p.presheaf));
            assert!(is_separated(&p.presheaf, &j));
        }
        let p = plus_construction(&f, &j).unwrap();
        assert!(!is_iso(&p.unit, &f, &p.presheaf));
    }

    #[test]
    fn factorizations() {
        let (cat, j) = j2();
        let f = f_c2(&cat);
        let a = sheafify(&f, &j).unwrap();
        let psi = factor_through_unit(&a.unit, &f, &a.sheaf, &j).unwrap();
        assert_eq!(psi, a.sheaf.identity_morphism());

        let p = plus_construction(&f, &j).unwrap();
        let psi = factor_through_unit(&p.unit, &f, &p.presheaf, &j).unwrap();
        assert!(is_iso(&psi, &a.sheaf, &p.presheaf));

        let v = cat.object_by_name("V").unwrap();
        let y = yoneda_set(&cat, v).unwrap();
        let id = y.identity_morphism();
        let back = factor_through_unit(&id, &y, &y, &j).unwrap();
        let ay = sheafify(&y, &j).unwrap();
        assert_eq!(ay.unit.then(&back), id);

        assert!(factor_through_unit(&f.identity_morphism(), &f, &f, &j).is_err());
    }

    #[test]
    fn adjunction_bijection_on_c2() {
        let (cat, j) = j2();
        let f = f_c2(&cat);
        let v = cat.object_by_name("V").unwrap();
        let g = yoneda_set(&cat, v).unwrap();
        let a = sheafify(&f, &j).unwrap();
        let left = a.sheaf.nat_transformations(&g);
        let right = f.nat_transformations(&g);
        assert_eq!(left.len(), right.len());
        for phi in &right {
            let psi = factor_through_unit(phi, &f, &g, &j).unwrap();
            assert!(left.contains(&psi));
        }
    }

    #[test]
    fn left_exact_on_products() {
        let (cat, j) = j2();
        let f = f_c2(&cat);
        let g = SetPresheaf::constant(cat.clone(), &["x", "y"]);
        let d = SetPresheafDiagram {
            base: cat.clone(),
            nodes: vec![f.clone(), g.clone()],
            edges: vec![],
        };
        let prod = set_pointwise_limit(&d).unwrap().apex;
        let a_prod = sheafify(&prod, &j).unwrap().sheaf;
        let parts = SetPresheafDiagram {
            base: cat.clone(),
            nodes: vec![
                sheafify(&f, &j).unwrap().sheaf,
                sheafify(&g, &j).unwrap().sheaf,
            ],
            edges: vec![],
        };
        let prod_a = set_pointwise_limit(&parts).unwrap().apex;
        assert!(isomorphic(&a_prod, &prod_a));
    }

    #[test]
    fn epis_in_sheaves() {
        let (cat, j) = j2();
        let v = cat.object_by_name("V").unwrap();
        let y = yoneda_set(&cat, v).unwrap();
        let r = sheaf_epi_check(&y.identity_morphism(), &y, &y, &j).unwrap();
        assert_eq!(
            r,
            EpiReport {
                epi: true,
                locally_surjective: true
            }
        );

        let empty = SetPresheaf::empty(cat.clone());
        let none = SetMorphism {
            components: vec![vec![]; cat.num_objects()],
        };
        let r = sheaf_epi_check(&none, &empty, &y, &j).unwrap();
        assert_eq!(
            r,
            EpiReport {
                epi: false,
                locally_surjective: false
            }
        );

        let ring = FinRing::cyclic(2).unwrap();
        let ym = yoneda_mod(&cat, &ring, v).unwrap();
        let zero = ModPresheaf::zero(cat.clone(), &ring);
        let z = ModMorphism::new(
            cat.objects()
                .map(|c| ModuleHom::zero(zero.value(c), ym.value(c)))
                .collect(),
        );
        let r = sheaf_epi_check(&z, &zero, &ym, &j).unwrap();
        assert!(!r.epi && !r.locally_surjective);
        let r = sheaf_epi_check(&ym.identity_morphism(), &ym, &ym, &j).unwrap();
        assert!(r.epi && r.locally_surjective);

        let f = f_c2(&cat);
        assert!(sheaf_epi_check(&f.identity_morphism(), &f, &f, &j).is_err());
    }
}
