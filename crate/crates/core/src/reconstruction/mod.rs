//! Rebuilding an ambient category from a generating site: the site of
//! generators, restricted Yoneda, the tensor/hom adjunction with its unit
//! and counit.
//!
//! The Set flavor works inside an explicit finite ambient category, where
//! colimits are found by search and may be absent. The linear flavor
//! ([`LinearSite`]) works with sheaves of modules, where they always exist.

mod linear;

use std::sync::Arc;

use crate::category::{
    coequalizer, coproduct, factor_through_colimit, finite_colimit, is_iso as is_iso_arrow, ArrowId, Cone,
    Diagram, FinCategory, FunctorData, ObjId,
};
use crate::error::{Error, Result};
use crate::modules::FinRing;
use crate::presheaf::{
    category_of_elements, free_module_on, is_iso, set_nat_transformations, ModPresheaf, Presheaf, SetMorphism,
    SetPresheaf,
};
use crate::sheaf::{sheaf_witness, SheafWitness};
use crate::site::{epimorphic_basis, generate_topology, validate_basis, Basis, BasisReport, GrothendieckTopology};

pub use linear::{coproduct_check, CoproductReport, HomFunctor, LeftAdjoint, LinearSite};

/// A generating set of an ambient category with the site it spans.
#[derive(Clone, Debug)]
pub struct SiteContext {
    pub ambient: Arc<FinCategory>,
    pub gens: Vec<ObjId>,
    pub site: Arc<FinCategory>,
    /// The inclusion `A` of the site into the ambient category.
    pub inclusion: FunctorData,
    pub basis: Basis,
    pub basis_report: BasisReport,
    /// `None` when the basis fails validation.
    pub topology: Option<GrothendieckTopology>,
}

impl SiteContext {
    pub fn topology(&self) -> Result<&GrothendieckTopology> {
        self.topology
            .as_ref()
            .ok_or_else(|| Error::InvalidBasis(self.basis_report.to_string()))
    }

    fn include(&self, c: ObjId) -> ObjId {
        self.inclusion.map_object(c)
    }
}

/// Full subcategory on `gens` with the topology generated by epimorphic
/// families. A basis that fails validation is kept for diagnosis.
pub fn build_site(ambient: &Arc<FinCategory>, gens: &[ObjId]) -> Result<SiteContext> {
    let es = epimorphic_basis(ambient, gens, None)?;
    let basis_report = validate_basis(&es.basis)?;
    let topology = if basis_report.is_valid() { Some(generate_topology(&es.basis)?) } else { None };
    Ok(SiteContext {
        ambient: ambient.clone(),
        gens: es.inclusion.object_map.clone(),
        site: es.site,
        inclusion: es.inclusion,
        basis: es.basis,
        basis_report,
        topology,
    })
}

/// `E^ = Hom(A(-), E)` on the site; restriction is precomposition.
pub fn restricted_yoneda(ctx: &SiteContext, e: ObjId) -> Result<SetPresheaf> {
    let amb = &ctx.ambient;
    if e.0 >= amb.num_objects() {
        return Err(Error::UnknownObject(format!("#{}", e.0)));
    }
    let values = ctx
        .site
        .objects()
        .map(|c| amb.hom(ctx.include(c), e).iter().map(|&g| amb.arrow_name(g).to_string()).collect())
        .collect();
    let restrictions = ctx
        .site
        .arrow_ids()
        .map(|u| {
            let a = ctx.inclusion.map_arrow(u);
            let dst = amb.hom(amb.source(a), e);
            amb.hom(amb.target(a), e)
                .iter()
                .map(|&g| dst.iter().position(|&h| h == amb.comp(g, a)).expect("composite in hom-set"))
                .collect()
        })
        .collect();
    SetPresheaf::from_parts(ctx.site.clone(), values, restrictions)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObjectSheafReport {
    pub object: ObjId,
    pub name: String,
    pub witness: Option<SheafWitness>,
}

/// Runs the sheaf check on `E^` for every ambient object.
pub fn objects_are_sheaves(ctx: &SiteContext) -> Result<Vec<ObjectSheafReport>> {
    let j = ctx.topology()?;
    ctx.ambient
        .objects()
        .map(|e| {
            let p = restricted_yoneda(ctx, e)?;
            Ok(ObjectSheafReport { object: e, name: ctx.ambient.object_name(e).to_string(), witness: sheaf_witness(&p, j) })
        })
        .collect()
}

/// `alpha o -: E^ -> E'^`.
pub fn morphism_to_nat_trans(ctx: &SiteContext, alpha: ArrowId) -> Result<SetMorphism> {
    let amb = &ctx.ambient;
    if alpha.0 >= amb.num_arrows() {
        return Err(Error::UnknownArrow(format!("#{}", alpha.0)));
    }
    let (e, e2) = (amb.source(alpha), amb.target(alpha));
    let components = ctx
        .site
        .objects()
        .map(|c| {
            let dst = amb.hom(ctx.include(c), e2);
            amb.hom(ctx.include(c), e)
                .iter()
                .map(|&g| dst.iter().position(|&h| h == amb.comp(alpha, g)).expect("composite in hom-set"))
                .collect()
        })
        .collect();
    Ok(SetMorphism { components })
}

/// Whether `E -> E^` is injective and surjective on every hom-set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingTally {
    pub pairs: usize,
    pub faithful: bool,
    pub full: bool,
    /// Pairs `(E, E')` where the hom-set map is not a bijection.
    pub failures: Vec<(ObjId, ObjId)>,
}

pub fn embedding_tally(ctx: &SiteContext) -> Result<EmbeddingTally> {
    let amb = &ctx.ambient;
    let hats: Vec<SetPresheaf> = amb.objects().map(|e| restricted_yoneda(ctx, e)).collect::<Result<_>>()?;
    let mut tally = EmbeddingTally { pairs: 0, faithful: true, full: true, failures: Vec::new() };
    for e in amb.objects() {
        for e2 in amb.objects() {
            tally.pairs += 1;
            let mut images = amb
                .hom(e, e2)
                .iter()
                .map(|&a| morphism_to_nat_trans(ctx, a))
                .collect::<Result<Vec<_>>>()?;
            let n = images.len();
            images.sort_by(|x, y| x.components.cmp(&y.components));
            images.dedup();
            let injective = images.len() == n;
            let surjective = set_nat_transformations(&hats[e.0], &hats[e2.0]).len() == images.len();
            tally.faithful &= injective;
            tally.full &= surjective;
            if !(injective && surjective) {
                tally.failures.push((e, e2));
            }
        }
    }
    Ok(tally)
}

/// The free module on `E^`.
pub fn hom_functor_r(ctx: &SiteContext, ring: &FinRing, e: ObjId) -> Result<ModPresheaf> {
    let hat = restricted_yoneda(ctx, e)?;
    let site = &ctx.site;
    let values = site.objects().map(|c| free_module_on(ring, hat.card(c))).collect();
    let restrictions = site
        .arrow_ids()
        .map(|u| {
            let (d, c) = (site.source(u), site.target(u));
            crate::presheaf::free_map(ring, hat.card(c), hat.card(d), hat.restriction(u))
        })
        .collect();
    ModPresheaf::new(site.clone(), ring, values, restrictions)
}

/// `F (x)_C A` in the ambient category: the colimit of `A o pi_F` over the
/// category of elements, one leg per element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetTensor {
    pub object: ObjId,
    pub elements: Vec<(ObjId, usize)>,
    pub legs: Vec<ArrowId>,
    /// Whether the coproduct/coequalizer presentation is isomorphic;
    /// `None` when the ambient category lacks one of its pieces.
    pub presentation_agrees: Option<bool>,
}

impl SetTensor {
    fn cocone(&self) -> Cone {
        Cone { apex: self.object, legs: self.legs.clone() }
    }

    fn leg(&self, c: ObjId, p: usize) -> ArrowId {
        self.legs[self.elements.iter().position(|&e| e == (c, p)).expect("element")]
    }
}

fn check_base(ctx: &SiteContext, f: &SetPresheaf) -> Result<()> {
    if f.base().as_ref() != ctx.site.as_ref() {
        return Err(Error::Mismatch("presheaf is not on the site".into()));
    }
    Ok(())
}

/// `None` when the ambient category lacks the colimit.
pub fn tensor_with_a(ctx: &SiteContext, f: &SetPresheaf) -> Result<Option<SetTensor>> {
    check_base(ctx, f)?;
    let amb = ctx.ambient.as_ref();
    let el = category_of_elements(f)?;
    let nodes: Vec<ObjId> = el.elements.iter().map(|&(c, _)| ctx.include(c)).collect();
    let relations: Vec<(ArrowId, usize, usize)> = el
        .category
        .arrow_ids()
        .filter(|&a| !el.category.is_identity(a))
        .map(|a| {
            let u = el.arrows[a.0].0;
            (ctx.inclusion.map_arrow(u), el.category.source(a).0, el.category.target(a).0)
        })
        .collect();
    let mut d = Diagram::new(nodes.clone());
    for &(a, s, t) in &relations {
        d = d.edge(s, t, a);
    }
    let Some(colim) = finite_colimit(amb, &d) else { return Ok(None) };

    let presentation_agrees = (|| {
        let gens = coproduct(amb, &nodes)?;
        let rels = coproduct(amb, &relations.iter().map(|&(a, _, _)| amb.source(a)).collect::<Vec<_>>())?;
        let theta = Cone { apex: gens.apex, legs: relations.iter().map(|&(_, s, _)| gens.legs[s]).collect() };
        let tau = Cone {
            apex: gens.apex,
            legs: relations.iter().map(|&(a, _, t)| amb.comp(gens.legs[t], a)).collect(),
        };
        let (th, ta) = (factor_through_colimit(amb, &rels, &theta)?, factor_through_colimit(amb, &rels, &tau)?);
        let (q_obj, q) = coequalizer(amb, th, ta)?;
        let via = Cone { apex: q_obj, legs: gens.legs.iter().map(|&l| amb.comp(q, l)).collect() };
        let k = factor_through_colimit(amb, &colim, &via);
        Some(k.is_some_and(|k| is_iso_arrow(amb, k)))
    })();

    Ok(Some(SetTensor { object: colim.apex, elements: el.elements.clone(), legs: colim.legs, presentation_agrees }))
}

/// Both sides of `Nat(F, E^) = Hom(F (x) A, E)` and the transposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjunctionReport {
    pub left: usize,
    pub right: usize,
    pub bijective: bool,
    /// Transposing twice returns the starting map, on both sides.
    pub triangles: bool,
}

impl AdjunctionReport {
    pub fn holds(&self) -> bool {
        self.bijective && self.triangles
    }
}

fn sharp(ctx: &SiteContext, t: &SetTensor, phi: &SetMorphism, e: ObjId) -> Option<ArrowId> {
    let amb = &ctx.ambient;
    let legs = t.elements.iter().map(|&(c, p)| amb.hom(ctx.include(c), e)[phi.components[c.0][p]]).collect();
    factor_through_colimit(amb, &t.cocone(), &Cone { apex: e, legs })
}

fn flat(ctx: &SiteContext, f: &SetPresheaf, t: &SetTensor, psi: ArrowId) -> SetMorphism {
    let amb = &ctx.ambient;
    let e = amb.target(psi);
    let components = ctx
        .site
        .objects()
        .map(|c| {
            let hom = amb.hom(ctx.include(c), e);
            (0..f.card(c))
                .map(|p| hom.iter().position(|&h| h == amb.comp(psi, t.leg(c, p))).expect("in hom-set"))
                .collect()
        })
        .collect();
    SetMorphism { components }
}

/// `None` when `F (x) A` does not exist in the ambient category.
pub fn set_adjunction_check(ctx: &SiteContext, f: &SetPresheaf, e: ObjId) -> Result<Option<AdjunctionReport>> {
    let Some(t) = tensor_with_a(ctx, f)? else { return Ok(None) };
    let hat = restricted_yoneda(ctx, e)?;
    let left = set_nat_transformations(f, &hat);
    let right = ctx.ambient.hom(t.object, e);
    let mut images: Vec<ArrowId> = Vec::new();
    let mut triangles = true;
    for phi in &left {
        match sharp(ctx, &t, phi, e) {
            Some(psi) => {
                triangles &= flat(ctx, f, &t, psi) == *phi;
                images.push(psi);
            }
            None => triangles = false,
        }
    }
    for &psi in right {
        triangles &= sharp(ctx, &t, &flat(ctx, f, &t, psi), e) == Some(psi);
    }
    let mut distinct = images.clone();
    distinct.sort();
    distinct.dedup();
    let bijective = images.len() == left.len() && distinct.len() == left.len() && left.len() == right.len();
    Ok(Some(AdjunctionReport { left: left.len(), right: right.len(), bijective, triangles }))
}

/// `p -> leg at (C, p)`, from `F` into the restricted Yoneda of `F (x) A`.
pub fn set_unit(ctx: &SiteContext, f: &SetPresheaf) -> Result<Option<(SetMorphism, SetPresheaf)>> {
    let Some(t) = tensor_with_a(ctx, f)? else { return Ok(None) };
    let hat = restricted_yoneda(ctx, t.object)?;
    Ok(Some((flat(ctx, f, &t, ctx.ambient.identity(t.object)), hat)))
}

pub fn set_unit_check(ctx: &SiteContext, f: &SetPresheaf) -> Result<Option<bool>> {
    Ok(set_unit(ctx, f)?.map(|(eta, hat)| is_iso(&eta, f, &hat)))
}

/// The counit `E^ (x) A -> E` induced by the evaluation cocone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounitReport {
    pub tensor: Option<ObjId>,
    pub counit: Option<ArrowId>,
    pub iso: bool,
}

pub fn set_counit_check(ctx: &SiteContext, e: ObjId) -> Result<CounitReport> {
    let hat = restricted_yoneda(ctx, e)?;
    let Some(t) = tensor_with_a(ctx, &hat)? else {
        return Ok(CounitReport { tensor: None, counit: None, iso: false });
    };
    let counit = sharp(ctx, &t, &hat.identity_morphism(), e);
    let iso = counit.is_some_and(|k| is_iso_arrow(&ctx.ambient, k));
    Ok(CounitReport { tensor: Some(t.object), counit, iso })
}

#[cfg(test)]
mod tests;
