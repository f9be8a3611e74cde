use std::sync::Arc;

use super::{ModPresheaf, SetPresheaf};
use crate::category::{FinCategory, ObjId};
use crate::error::{Error, Result};
use crate::modules::{Factor, FinModule, FinRing, ModuleHom};

fn check_object(cat: &FinCategory, c: ObjId) -> Result<()> {
    if c.0 >= cat.num_objects() {
        return Err(Error::UnknownObject(format!("#{}", c.0)));
    }
    Ok(())
}

/// `Hom(-, c)`; restriction is precomposition.
pub fn yoneda_set(cat: &Arc<FinCategory>, c: ObjId) -> Result<SetPresheaf> {
    check_object(cat, c)?;
    let values = cat
        .objects()
        .map(|x| {
            cat.hom(x, c)
                .iter()
                .map(|&g| cat.arrow_name(g).to_string())
                .collect()
        })
        .collect();
    let restrictions = cat
        .arrow_ids()
        .map(|f| {
            let (y, x) = (cat.source(f), cat.target(f));
            let dst = cat.hom(y, c);
            cat.hom(x, c)
                .iter()
                .map(|&g| {
                    let gf = cat.comp(g, f);
                    dst.iter()
                        .position(|&h| h == gf)
                        .expect("composite lies in the hom-set")
                })
                .collect()
        })
        .collect();
    SetPresheaf::from_parts(cat.clone(), values, restrictions)
}

/// Free module on `n` generators: `n` copies of the regular module.
pub fn free_module_on(ring: &FinRing, n: usize) -> FinModule {
    let factors = (0..n)
        .flat_map(|_| {
            ring.components()
                .iter()
                .enumerate()
                .map(|(component, &order)| Factor { component, order })
        })
        .collect();
    FinModule::with_factors(ring, factors).expect("regular factors")
}

/// Linear extension of a map of finite sets between free modules.
pub(crate) fn free_map(ring: &FinRing, dom: usize, cod: usize, map: &[usize]) -> ModuleHom {
    let k = ring.num_components();
    let (src, tgt) = (free_module_on(ring, dom), free_module_on(ring, cod));
    let mut matrix = vec![vec![0i64; dom * k]; cod * k];
    for (s, &t) in map.iter().enumerate() {
        for j in 0..k {
            matrix[t * k + j][s * k + j] = 1;
        }
    }
    ModuleHom::new(&src, &tgt, matrix).expect("free map")
}

/// The free module on `Hom(-, c)`.
pub fn yoneda_mod(cat: &Arc<FinCategory>, ring: &FinRing, c: ObjId) -> Result<ModPresheaf> {
    let y = yoneda_set(cat, c)?;
    let values = cat
        .objects()
        .map(|x| free_module_on(ring, y.values(x).len()))
        .collect();
    let restrictions = cat
        .arrow_ids()
        .map(|f| {
            let (s, t) = (cat.source(f), cat.target(f));
            free_map(ring, y.values(t).len(), y.values(s).len(), y.restriction(f))
        })
        .collect();
    ModPresheaf::from_parts(cat.clone(), ring, values, restrictions)
}

#[cfg(test)]
mod tests {
    use super::super::{validate_presheaf, Presheaf, PresheafMorphism, SetPresheafBuilder};
    use super::*;
    use crate::category::cyclic_group;
    use crate::category::fixtures::{c2, chain3};
    use crate::modules::all_homs;

    fn ids(cat: &FinCategory, names: &[&str]) -> Vec<ObjId> {
        names
            .iter()
            .map(|n| cat.object_by_name(n).unwrap())
            .collect()
    }

    #[test]
    fn set_yoneda_on_c2() {
        let cat = Arc::new(c2());
        let [u, v] = ids(&cat, &["U", "V"])[..] else {
            unreachable!()
        };
        let yv = yoneda_set(&cat, v).unwrap();
        assert_eq!(yv.values(v), ["id_V"]);
        assert_eq!(yv.values(u), ["i"]);
        let i = cat.arrow_by_name("i").unwrap();
        assert_eq!(yv.restriction(i), [0]);
        let yu = yoneda_set(&cat, u).unwrap();
        assert!(yu.values(v).is_empty());
        assert_eq!(yu.values(u), ["id_U"]);
        assert!(validate_presheaf(&yv).is_empty() && validate_presheaf(&yu).is_empty());
        assert!(yoneda_set(&cat, ObjId(7)).is_err());
    }

    #[test]
    fn mod_yoneda_on_c2() {
        let cat = Arc::new(c2());
        let r = FinRing::cyclic(2).unwrap();
        let [u, v] = ids(&cat, &["U", "V"])[..] else {
            unreachable!()
        };
        let yv = yoneda_mod(&cat, &r, v).unwrap();
        assert_eq!(yv.value(v).orders(), [2]);
        assert_eq!(yv.value(u).orders(), [2]);
        let i = cat.arrow_by_name("i").unwrap();
        assert_eq!(yv.restriction(i).matrix(), [vec![1]]);
        assert!(yoneda_mod(&cat, &r, u).unwrap().value(v).is_zero());
        assert!(validate_presheaf(&yv).is_empty());
    }

    #[test]
    fn set_yoneda_lemma_by_enumeration() {
        let cat = Arc::new(c2());
        let v = cat.object_by_name("V").unwrap();
        let f = SetPresheafBuilder::new(cat.clone())
            .value("V", ["p", "q"])
            .unwrap()
            .value("U", ["a", "b"])
            .unwrap()
            .restriction("i", [("p", "a"), ("q", "a")])
            .unwrap()
            .build()
            .unwrap();
        let yv = yoneda_set(&cat, v).unwrap();
        let nats = yv.nat_transformations(&f);
        assert_eq!(nats.len(), f.card(v));
        let mut evals: Vec<usize> = nats.iter().map(|n| n.apply(v, 0)).collect();
        evals.sort();
        assert_eq!(evals, vec![0, 1]);
        assert!(f.nat_transformations(&f).contains(&f.identity_morphism()));
    }

    #[test]
    fn fully_faithful_on_small_categories() {
        for cat in [
            Arc::new(c2()),
            Arc::new(chain3()),
            Arc::new(cyclic_group(3).unwrap()),
        ] {
            let r = FinRing::cyclic(2).unwrap();
            for x in cat.objects() {
                for y in cat.objects() {
                    let (yx, yy) = (yoneda_set(&cat, x).unwrap(), yoneda_set(&cat, y).unwrap());
                    assert_eq!(yx.nat_transformations(&yy).len(), cat.hom(x, y).len());
                    let (mx, my) = (
                        yoneda_mod(&cat, &r, x).unwrap(),
                        yoneda_mod(&cat, &r, y).unwrap(),
                    );
                    let n = mx.nat_transformations(&my).len();
                    assert_eq!(n, 1 << cat.hom(x, y).len());
                }
            }
        }
    }

    #[test]
    fn mod_yoneda_lemma_counts() {
        let cat = Arc::new(c2());
        let r = FinRing::cyclic(4).unwrap();
        let v = cat.object_by_name("V").unwrap();
        let yv = yoneda_mod(&cat, &r, v).unwrap();
        let gv = FinModule::new(&r, &[4]).unwrap();
        let gu = FinModule::new(&r, &[2]).unwrap();
        for h in all_homs(&gv, &gu) {
            let id_u = ModuleHom::identity(&gu);
            let id_v = ModuleHom::identity(&gv);
            let mut restrictions = vec![id_u.clone(); cat.num_arrows()];
            restrictions[cat.arrow_by_name("i").unwrap().0] = h.clone();
            restrictions[cat.identity(v).0] = id_v;
            let g = ModPresheaf::new(cat.clone(), &r, vec![gu.clone(), gv.clone()], restrictions)
                .unwrap();
            assert_eq!(yv.nat_transformations(&g).len(), g.card(v));
        }
    }
}
