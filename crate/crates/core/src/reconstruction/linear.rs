use std::sync::Arc;

use super::AdjunctionReport;
use crate::category::{ArrowId, FinCategory, ObjId};
use crate::error::{Error, Result};
use crate::modules::{direct_sum_many, FinModule, FinRing, ModuleHom};
use crate::presheaf::{
    free_map, free_module_on, is_iso, isomorphic, linear_elements_colimit, linear_map, mod_pointwise_colimit,
    mod_pointwise_limit, nat_module, tensor_generator_keys, tensor_with_yoneda, yoneda_mod, ModMorphism,
    ModPresheaf, ModPresheafDiagram, NatModule, Presheaf, PresheafMorphism, TensorPresentation,
};
use crate::sheaf::{is_locally_surjective, is_sheaf, sheafify, sheafify_map, Sheafified};
use crate::site::GrothendieckTopology;

/// Sheaves of modules on a site, with `A(C)` the sheafified free
/// representable. The trivial topology gives all presheaves.
#[derive(Clone, Debug)]
pub struct LinearSite {
    pub base: Arc<FinCategory>,
    pub ring: FinRing,
    pub topology: GrothendieckTopology,
}

/// `R(E)(C) = Nat(y C, E)` as modules, with the module structure of each
/// hom kept for transposition.
#[derive(Clone, Debug)]
pub struct HomFunctor {
    pub presheaf: ModPresheaf,
    pub nats: Vec<NatModule>,
}

/// `L(F) = a(F (x)_C y)` with the coequalizer presentation.
#[derive(Clone, Debug)]
pub struct LeftAdjoint {
    pub presentation: TensorPresentation,
    pub sheafified: Sheafified<ModPresheaf>,
}

impl LeftAdjoint {
    pub fn value(&self) -> &ModPresheaf {
        &self.sheafified.sheaf
    }
}

/// `y(u): y C' -> y C` for `u: C' -> C`.
fn yoneda_arrow(cat: &FinCategory, ring: &FinRing, u: ArrowId) -> ModMorphism {
    let (c1, c) = (cat.source(u), cat.target(u));
    ModMorphism::new(
        cat.objects()
            .map(|x| {
                let (from, to) = (cat.hom(x, c1), cat.hom(x, c));
                let map: Vec<usize> = from
                    .iter()
                    .map(|&g| to.iter().position(|&h| h == cat.comp(u, g)).expect("in hom-set"))
                    .collect();
                free_map(ring, from.len(), to.len(), &map)
            })
            .collect(),
    )
}

fn idempotent(ring: &FinRing, j: usize) -> Vec<u64> {
    (0..ring.num_components()).map(|k| u64::from(k == j)).collect()
}

impl LinearSite {
    pub fn new(ring: FinRing, topology: GrothendieckTopology) -> Self {
        LinearSite { base: topology.base().clone(), ring, topology }
    }

    pub fn presheaves(base: Arc<FinCategory>, ring: FinRing) -> Self {
        Self::new(ring, GrothendieckTopology::trivial(base))
    }

    fn check(&self, p: &ModPresheaf) -> Result<()> {
        if p.base().as_ref() != self.base.as_ref() || p.ring() != &self.ring {
            return Err(Error::Mismatch("presheaf is not on this site".into()));
        }
        Ok(())
    }

    fn check_sheaf(&self, e: &ModPresheaf) -> Result<()> {
        self.check(e)?;
        if !is_sheaf(e, &self.topology) {
            return Err(Error::Mismatch("object is not a sheaf".into()));
        }
        Ok(())
    }

    pub fn representable(&self, c: ObjId) -> Result<ModPresheaf> {
        yoneda_mod(&self.base, &self.ring, c)
    }

    /// `A(C)`.
    pub fn generator(&self, c: ObjId) -> Result<ModPresheaf> {
        Ok(sheafify(&self.representable(c)?, &self.topology)?.sheaf)
    }

    /// `R(E)`; maps out of `A(C)` into a sheaf are maps out of `y C`.
    pub fn hom_functor(&self, e: &ModPresheaf) -> Result<HomFunctor> {
        self.check(e)?;
        let cat = &self.base;
        let nats: Vec<NatModule> =
            cat.objects().map(|c| nat_module(&self.representable(c)?, e)).collect::<Result<_>>()?;
        let restrictions = cat
            .arrow_ids()
            .map(|u| {
                let (c1, c) = (cat.source(u), cat.target(u));
                let yu = yoneda_arrow(cat, &self.ring, u);
                linear_map(&nats[c.0].module, &nats[c1.0].module, |x| {
                    nats[c1.0].from_morphism(&yu.then(&nats[c.0].to_morphism(x)))
                })
            })
            .collect::<Result<_>>()?;
        let values = nats.iter().map(|n| n.module.clone()).collect();
        let presheaf = ModPresheaf::new(cat.clone(), &self.ring, values, restrictions)?;
        Ok(HomFunctor { presheaf, nats })
    }

    /// `R(b): R(E) -> R(E')`, postcomposition with `b`.
    pub fn hom_functor_map(&self, b: &ModMorphism, re: &HomFunctor, re2: &HomFunctor) -> Result<ModMorphism> {
        let comps = self
            .base
            .objects()
            .map(|c| {
                let (n, n2) = (&re.nats[c.0], &re2.nats[c.0]);
                linear_map(&n.module, &n2.module, |x| n2.from_morphism(&n.to_morphism(x).then(b)))
            })
            .collect::<Result<_>>()?;
        Ok(ModMorphism::new(comps))
    }

    pub fn left_adjoint(&self, f: &ModPresheaf) -> Result<LeftAdjoint> {
        self.check(f)?;
        let presentation = tensor_with_yoneda(f)?;
        let sheafified = sheafify(&presentation.tensor, &self.topology)?;
        Ok(LeftAdjoint { presentation, sheafified })
    }

    /// The coend presentation and the linear colimit over the category of
    /// elements give isomorphic presheaves.
    pub fn tensor_paths_agree(&self, f: &ModPresheaf) -> Result<bool> {
        let lf = self.left_adjoint(f)?;
        let el = linear_elements_colimit(f)?;
        Ok(isomorphic(&lf.presentation.tensor, &el.colimit))
    }

    /// `L(y C) = A(C)`.
    pub fn tensor_unit_check(&self, c: ObjId) -> Result<bool> {
        let lf = self.left_adjoint(&self.representable(c)?)?;
        Ok(isomorphic(lf.value(), &self.generator(c)?))
    }

    /// The map `F (x) y -> E` on generators `x` in the `(C, g)` copy:
    /// evaluate `phi_C(x)` at `g`, then pass to the quotient.
    fn transpose_to_tensor(
        &self,
        f: &ModPresheaf,
        lf: &LeftAdjoint,
        re: &HomFunctor,
        e: &ModPresheaf,
        phi: &ModMorphism,
    ) -> Result<ModMorphism> {
        let cat = &self.base;
        let pres = &lf.presentation;
        let mut comps = Vec::new();
        for x in cat.objects() {
            let keys = tensor_generator_keys(cat, x);
            let sum = direct_sum_many(&self.ring, &keys.iter().map(|&(c, _)| f.value(c).clone()).collect::<Vec<_>>())?;
            let on_gens = linear_map(&pres.generators[x.0], e.value(x), |v| {
                let mut out = e.value(x).zero_element();
                for (n, &(c, g)) in keys.iter().enumerate() {
                    let alpha = re.nats[c.0].to_morphism(&phi.component(c).apply(&sum.projections[n].apply(v)));
                    let pos = cat.hom(x, c).iter().position(|&h| h == g).expect("in hom-set");
                    let k = self.ring.num_components();
                    let free = free_module_on(&self.ring, cat.hom(x, c).len());
                    let mut basis = free.zero_element();
                    for j in 0..k {
                        basis[pos * k + j] = 1;
                    }
                    out = e.value(x).add(&out, &alpha.component(x).apply(&basis));
                }
                Ok(out)
            })?;
            comps.push(
                on_gens
                    .descend_through(&pres.phi[x.0])
                    .ok_or_else(|| Error::Internal("transpose does not respect the relations".into()))?,
            );
        }
        Ok(ModMorphism::new(comps))
    }

    /// `phi: F -> R(E)` to `L F -> E`, located among `right` by its
    /// restriction along the sheafification unit.
    fn sharp_index(
        &self,
        f: &ModPresheaf,
        lf: &LeftAdjoint,
        re: &HomFunctor,
        e: &ModPresheaf,
        phi: &ModMorphism,
        restricted: &[ModMorphism],
    ) -> Result<Option<usize>> {
        let m = self.transpose_to_tensor(f, lf, re, e, phi)?;
        let hits: Vec<usize> = (0..restricted.len()).filter(|&k| restricted[k] == m).collect();
        Ok(if hits.len() == 1 { Some(hits[0]) } else { None })
    }

    /// `psi: L F -> E` to `F -> R(E)`: `x` in `F(C)` goes to `g -> psi[x at (C, g)]`.
    pub fn flat(&self, f: &ModPresheaf, lf: &LeftAdjoint, re: &HomFunctor, e: &ModPresheaf, psi: &ModMorphism) -> Result<ModMorphism> {
        let cat = &self.base;
        let pres = &lf.presentation;
        let k = self.ring.num_components();
        let through = ModMorphism::new(pres.phi.clone()).then(&lf.sheafified.unit).then(psi);
        let sums = cat
            .objects()
            .map(|x| {
                let keys = tensor_generator_keys(cat, x);
                direct_sum_many(&self.ring, &keys.iter().map(|&(c, _)| f.value(c).clone()).collect::<Vec<_>>())
                    .map(|s| (keys, s))
            })
            .collect::<Result<Vec<_>>>()?;
        let comps = cat
            .objects()
            .map(|c| {
                linear_map(f.value(c), &re.nats[c.0].module, |v| {
                    let alpha = ModMorphism::new(
                        cat.objects()
                            .map(|x| {
                                let (keys, sum) = &sums[x.0];
                                let hom = cat.hom(x, c);
                                let columns: Vec<_> = hom
                                    .iter()
                                    .flat_map(|&g| {
                                        let n = keys.iter().position(|&t| t == (c, g)).expect("key");
                                        let w = through.component(x).apply(&sum.injections[n].apply(v));
                                        (0..k).map(move |j| (j, w.clone()))
                                    })
                                    .map(|(j, w)| e.value(x).scale(&idempotent(&self.ring, j), &w))
                                    .collect();
                                ModuleHom::from_columns(&free_module_on(&self.ring, hom.len()), e.value(x), &columns)
                            })
                            .collect::<Result<_>>()?,
                    );
                    re.nats[c.0].from_morphism(&alpha)
                })
            })
            .collect::<Result<_>>()?;
        Ok(ModMorphism::new(comps))
    }

    /// `phi: F -> R(E)` to `L F -> E`.
    pub fn sharp(&self, f: &ModPresheaf, lf: &LeftAdjoint, re: &HomFunctor, e: &ModPresheaf, phi: &ModMorphism) -> Result<ModMorphism> {
        let right = lf.value().nat_transformations(e);
        let restricted: Vec<ModMorphism> = right.iter().map(|psi| lf.sheafified.unit.then(psi)).collect();
        let k = self
            .sharp_index(f, lf, re, e, phi, &restricted)?
            .ok_or_else(|| Error::Internal("no unique transpose".into()))?;
        Ok(right[k].clone())
    }

    /// Enumerates `Nat(F, R E)` and `Hom(L F, E)` and transposes both ways.
    pub fn adjunction_check(&self, f: &ModPresheaf, e: &ModPresheaf) -> Result<AdjunctionReport> {
        self.check(f)?;
        self.check_sheaf(e)?;
        let lf = self.left_adjoint(f)?;
        let re = self.hom_functor(e)?;
        let left = f.nat_transformations(&re.presheaf);
        let right = lf.value().nat_transformations(e);
        let restricted: Vec<ModMorphism> = right.iter().map(|psi| lf.sheafified.unit.then(psi)).collect();
        let mut hit = vec![false; right.len()];
        let mut injective = true;
        let mut triangles = true;
        for phi in &left {
            match self.sharp_index(f, &lf, &re, e, phi, &restricted)? {
                Some(k) => {
                    injective &= !hit[k];
                    hit[k] = true;
                    triangles &= self.flat(f, &lf, &re, e, &right[k])? == *phi;
                }
                None => triangles = false,
            }
        }
        for psi in &right {
            let back = self.flat(f, &lf, &re, e, psi)?;
            let again = self.sharp_index(f, &lf, &re, e, &back, &restricted)?;
            triangles &= again.is_some_and(|k| right[k] == *psi);
        }
        let bijective = injective && hit.iter().all(|&h| h) && left.len() == right.len();
        Ok(AdjunctionReport { left: left.len(), right: right.len(), bijective, triangles })
    }

    /// `L(a) = (eta_F o a)#` for `a: F' -> F`.
    pub fn left_adjoint_map(&self, a: &ModMorphism, f1: &ModPresheaf, f: &ModPresheaf) -> Result<ModMorphism> {
        let lf = self.left_adjoint(f)?;
        let lf1 = self.left_adjoint(f1)?;
        let rlf = self.hom_functor(lf.value())?;
        let eta = self.flat(f, &lf, &rlf, lf.value(), &lf.value().identity_morphism())?;
        self.sharp(f1, &lf1, &rlf, lf.value(), &a.then(&eta))
    }

    /// `(phi o a)# = phi# o L(a)` for every `phi: F -> R(E)`.
    pub fn naturality_in_f(&self, a: &ModMorphism, f1: &ModPresheaf, f: &ModPresheaf, e: &ModPresheaf) -> Result<bool> {
        let la = self.left_adjoint_map(a, f1, f)?;
        let (lf, lf1, re) = (self.left_adjoint(f)?, self.left_adjoint(f1)?, self.hom_functor(e)?);
        for phi in f.nat_transformations(&re.presheaf) {
            let lhs = self.sharp(f1, &lf1, &re, e, &a.then(&phi))?;
            let rhs = la.then(&self.sharp(f, &lf, &re, e, &phi)?);
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `(R(b) o phi)# = b o phi#` for every `phi: F -> R(E)`.
    pub fn naturality_in_e(&self, f: &ModPresheaf, b: &ModMorphism, e: &ModPresheaf, e2: &ModPresheaf) -> Result<bool> {
        let lf = self.left_adjoint(f)?;
        let (re, re2) = (self.hom_functor(e)?, self.hom_functor(e2)?);
        let rb = self.hom_functor_map(b, &re, &re2)?;
        for phi in f.nat_transformations(&re.presheaf) {
            let lhs = self.sharp(f, &lf, &re2, e2, &phi.then(&rb))?;
            let rhs = self.sharp(f, &lf, &re, e, &phi)?.then(b);
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `eta_F = (id_{L F})_flat: F -> R(L F)`, with its codomain.
    pub fn unit(&self, f: &ModPresheaf) -> Result<(ModMorphism, ModPresheaf)> {
        let lf = self.left_adjoint(f)?;
        let rlf = self.hom_functor(lf.value())?;
        let eta = self.flat(f, &lf, &rlf, lf.value(), &lf.value().identity_morphism())?;
        Ok((eta, rlf.presheaf))
    }

    pub fn unit_check(&self, f: &ModPresheaf) -> Result<bool> {
        let (eta, rlf) = self.unit(f)?;
        Ok(is_iso(&eta, f, &rlf))
    }

    /// `eps_E = (id_{R E})#: L R E -> E`, with its domain.
    pub fn counit(&self, e: &ModPresheaf) -> Result<(ModMorphism, ModPresheaf)> {
        self.check_sheaf(e)?;
        let re = self.hom_functor(e)?;
        let lre = self.left_adjoint(&re.presheaf)?;
        let eps = self.sharp(&re.presheaf, &lre, &re, e, &re.presheaf.identity_morphism())?;
        Ok((eps, lre.value().clone()))
    }

    pub fn counit_check(&self, e: &ModPresheaf) -> Result<bool> {
        let (eps, lre) = self.counit(e)?;
        Ok(is_iso(&eps, &lre, e))
    }
}

/// Whether `R(E1) + R(E2) -> R(E1 + E2)` becomes an isomorphism after
/// sheafification; `mono` checks that the kernel pair lands in the diagonal
/// after sheafification and `epi` is local surjectivity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoproductReport {
    pub iso: bool,
    pub mono: bool,
    pub epi: bool,
}

fn coproduct_of(site: &LinearSite, a: &ModPresheaf, b: &ModPresheaf) -> Result<(ModPresheaf, Vec<ModMorphism>)> {
    let d = ModPresheafDiagram { base: site.base.clone(), ring: site.ring.clone(), nodes: vec![a.clone(), b.clone()], edges: vec![] };
    let cone = mod_pointwise_colimit(&d)?;
    Ok((cone.apex, cone.legs))
}

pub fn coproduct_check(site: &LinearSite, e1: &ModPresheaf, e2: &ModPresheaf) -> Result<CoproductReport> {
    site.check_sheaf(e1)?;
    site.check_sheaf(e2)?;
    let j = &site.topology;
    let (s, inj) = coproduct_of(site, e1, e2)?;
    let (r1, r2, rs) = (site.hom_functor(e1)?, site.hom_functor(e2)?, site.hom_functor(&s)?);
    let ri = [site.hom_functor_map(&inj[0], &r1, &rs)?, site.hom_functor_map(&inj[1], &r2, &rs)?];
    let (d, legs) = coproduct_of(site, &r1.presheaf, &r2.presheaf)?;
    let comps = site
        .base
        .objects()
        .map(|c| {
            let parts: Vec<FinModule> = vec![r1.presheaf.value(c).clone(), r2.presheaf.value(c).clone()];
            let bp = direct_sum_many(&site.ring, &parts)?;
            let mut to_rs = ModuleHom::zero(&bp.sum, rs.presheaf.value(c));
            let mut to_d = ModuleHom::zero(&bp.sum, d.value(c));
            for k in 0..2 {
                to_rs = to_rs.add(&ri[k].component(c).compose(&bp.projections[k])?)?;
                to_d = to_d.add(&legs[k].component(c).compose(&bp.projections[k])?)?;
            }
            to_rs
                .descend_through(&to_d)
                .ok_or_else(|| Error::Internal("comparison does not descend".into()))
        })
        .collect::<Result<_>>()?;
    let phi = ModMorphism::new(comps);
    let epi = is_locally_surjective(&phi, &d, &rs.presheaf, j);
    let kp = ModPresheafDiagram {
        base: site.base.clone(),
        ring: site.ring.clone(),
        nodes: vec![d.clone(), d.clone(), rs.presheaf.clone()],
        edges: vec![(0, 2, phi.clone()), (1, 2, phi.clone())],
    };
    let pair = mod_pointwise_limit(&kp)?;
    let mono = sheafify_map(&pair.legs[0], &pair.apex, &d, j)? == sheafify_map(&pair.legs[1], &pair.apex, &d, j)?;
    let a_phi = sheafify_map(&phi, &d, &rs.presheaf, j)?;
    let iso = is_iso(&a_phi, &sheafify(&d, j)?.sheaf, &sheafify(&rs.presheaf, j)?.sheaf);
    Ok(CoproductReport { iso, mono, epi })
}
