use super::{ModMorphism, ModPresheaf, Presheaf};
use crate::error::{Error, Result};
use crate::modules::{direct_sum_many, hom_module, kernel, Biproduct, Element, FinModule, HomModule, ModuleHom};

/// The linear map determined by its values on the generators of `domain`.
pub(crate) fn linear_map(
    domain: &FinModule,
    codomain: &FinModule,
    mut f: impl FnMut(&Element) -> Result<Element>,
) -> Result<ModuleHom> {
    let columns = (0..domain.rank())
        .map(|k| {
            let mut e = domain.zero_element();
            e[k] = 1;
            f(&e)
        })
        .collect::<Result<Vec<_>>>()?;
    ModuleHom::from_columns(domain, codomain, &columns)
}

/// `Nat(P, Q)` as a submodule of `sum_X Hom(P(X), Q(X))`.
#[derive(Clone, Debug)]
pub struct NatModule {
    pub module: FinModule,
    /// Inclusion into the direct sum of component hom-modules.
    pub inclusion: ModuleHom,
    homs: Vec<HomModule>,
    sum: Biproduct,
}

impl NatModule {
    pub fn to_morphism(&self, x: &[u64]) -> ModMorphism {
        let y = self.inclusion.apply(x);
        ModMorphism::new(
            self.homs
                .iter()
                .zip(&self.sum.projections)
                .map(|(h, p)| h.to_hom(&p.apply(&y)))
                .collect(),
        )
    }

    pub fn from_morphism(&self, m: &ModMorphism) -> Result<Element> {
        let mut y = self.sum.sum.zero_element();
        for ((h, inj), c) in self.homs.iter().zip(&self.sum.injections).zip(m.components()) {
            y = self.sum.sum.add(&y, &inj.apply(&h.from_hom(c)));
        }
        self.inclusion
            .preimage(&y)
            .ok_or_else(|| Error::NotNatural("components do not form a natural transformation".into()))
    }
}

/// The kernel of `alpha -> (Q(f) alpha_X - alpha_Y P(f))_f`.
pub fn nat_module(p: &ModPresheaf, q: &ModPresheaf) -> Result<NatModule> {
    let cat = p.base();
    let ring = p.ring();
    if q.ring() != ring || !std::sync::Arc::ptr_eq(cat, q.base()) && cat != q.base() {
        return Err(Error::Mismatch("presheaves on different bases or rings".into()));
    }
    let homs: Vec<HomModule> = cat.objects().map(|c| hom_module(p.value(c), q.value(c))).collect::<Result<_>>()?;
    let sum = direct_sum_many(ring, &homs.iter().map(|h| h.module.clone()).collect::<Vec<_>>())?;
    let arrows: Vec<_> = cat.arrow_ids().filter(|&f| !cat.is_identity(f)).collect();
    let checks: Vec<HomModule> = arrows
        .iter()
        .map(|&f| hom_module(p.value(cat.target(f)), q.value(cat.source(f))))
        .collect::<Result<_>>()?;
    let target = direct_sum_many(ring, &checks.iter().map(|h| h.module.clone()).collect::<Vec<_>>())?;
    let delta = linear_map(&sum.sum, &target.sum, |e| {
        let mut out = target.sum.zero_element();
        for (k, &f) in arrows.iter().enumerate() {
            let (y, x) = (cat.source(f), cat.target(f));
            let ax = homs[x.0].to_hom(&sum.projections[x.0].apply(e));
            let ay = homs[y.0].to_hom(&sum.projections[y.0].apply(e));
            let d = q.restriction(f).compose(&ax)?.sub(&ay.compose(p.restriction(f))?)?;
            out = target.sum.add(&out, &target.injections[k].apply(&checks[k].from_hom(&d)));
        }
        Ok(out)
    })?;
    let k = kernel(&delta);
    Ok(NatModule { module: k.module, inclusion: k.map, homs, sum })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::category::fixtures::{c2, chain3};
    use crate::modules::FinRing;
    use crate::presheaf::{mod_nat_transformations, yoneda_mod};

    #[test]
    fn nat_module_matches_enumeration() {
        for cat in [Arc::new(c2()), Arc::new(chain3())] {
            let ring = FinRing::cyclic(2).unwrap();
            for c in cat.objects() {
                for d in cat.objects() {
                    let (p, q) = (yoneda_mod(&cat, &ring, c).unwrap(), yoneda_mod(&cat, &ring, d).unwrap());
                    let n = nat_module(&p, &q).unwrap();
                    let all = mod_nat_transformations(&p, &q);
                    assert_eq!(n.module.card(), all.len());
                    for x in n.module.elements() {
                        let m = n.to_morphism(&x);
                        assert!(all.contains(&m));
                        assert_eq!(n.from_morphism(&m).unwrap(), x);
                    }
                }
            }
        }
    }
}
