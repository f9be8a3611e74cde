//! Set- and module-valued presheaves on a finite category.
//!
//! Both flavors expose their values as finite sets of indexed elements via
//! the [`Presheaf`] trait, so that existence questions (matching families,
//! amalgamations, local surjectivity) are answered by one code path. Module
//! elements are indexed by [`FinModule::encode`](crate::modules::FinModule::encode).

mod colimits;
mod elements;
mod modp;
mod nat;
mod natmod;
mod representables;
mod set;
mod yoneda;

use std::fmt::Debug;
use std::sync::Arc;

use std::fmt;

use crate::category::{ArrowId, FinCategory, ObjId};

pub use colimits::{
    mod_pointwise_colimit, mod_pointwise_limit, set_pointwise_colimit, set_pointwise_limit,
    ModPresheafDiagram, PointwiseCone, SetPresheafDiagram,
};
pub use elements::{category_of_elements, ElementCategory};
pub use modp::{ModMorphism, ModPresheaf};
pub use nat::{mod_nat_transformations, set_isomorphism, set_nat_transformations, set_nat_transformations_up_to};
pub use natmod::{nat_module, NatModule};
pub(crate) use natmod::linear_map;
pub use representables::{
    colimit_of_representables_mod, colimit_of_representables_set, linear_elements_colimit,
    tensor_generator_keys, tensor_with_yoneda, RepresentableColimit, TensorPresentation,
};
pub use set::{SetMorphism, SetPresheaf, SetPresheafBuilder};
pub use yoneda::{free_module_on, yoneda_mod, yoneda_set};
pub(crate) use yoneda::free_map;

/// Element-level view of a presheaf.
pub trait Presheaf: Clone + Debug {
    type Morphism: PresheafMorphism;

    fn base(&self) -> &Arc<FinCategory>;
    fn card(&self, c: ObjId) -> usize;
    /// `F(f)` for `f: D -> C`, sending an element of `F(C)` to one of `F(D)`.
    fn restrict(&self, f: ArrowId, x: usize) -> usize;
    fn label(&self, c: ObjId, x: usize) -> String;

    fn nat_transformations(&self, other: &Self) -> Vec<Self::Morphism>;
    fn identity_morphism(&self) -> Self::Morphism;

    /// Some isomorphism `self -> other`.
    fn isomorphism(&self, other: &Self) -> Option<Self::Morphism> {
        if self.base().objects().any(|c| self.card(c) != other.card(c)) {
            return None;
        }
        self.nat_transformations(other).into_iter().find(|m| is_iso(m, self, other))
    }
}

pub trait PresheafMorphism: Clone + Debug + PartialEq {
    fn apply(&self, c: ObjId, x: usize) -> usize;
    /// `next o self`.
    fn then(&self, next: &Self) -> Self;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PresheafViolation {
    /// `F(id_C)` moves some element.
    Identity { arrow: String },
    /// `F(g o f) != F(f) o F(g)`.
    Composite { g: String, f: String },
}

impl fmt::Display for PresheafViolation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PresheafViolation::Identity { arrow } => {
                write!(out, "restriction along {arrow} is not the identity")
            }
            PresheafViolation::Composite { g, f } => {
                write!(out, "restriction along {g} o {f} is not F({f}) o F({g})")
            }
        }
    }
}

/// Every functoriality violation, by exhaustion over elements.
pub fn validate_presheaf<P: Presheaf>(p: &P) -> Vec<PresheafViolation> {
    let cat = p.base();
    let mut out = Vec::new();
    for c in cat.objects() {
        let id = cat.identity(c);
        if (0..p.card(c)).any(|x| p.restrict(id, x) != x) {
            out.push(PresheafViolation::Identity {
                arrow: cat.arrow_name(id).to_string(),
            });
        }
    }
    for (g, f) in cat.composable_pairs() {
        if cat.is_identity(g) || cat.is_identity(f) {
            continue;
        }
        let gf = cat.comp(g, f);
        let top = cat.target(g);
        if (0..p.card(top)).any(|x| p.restrict(gf, x) != p.restrict(f, p.restrict(g, x))) {
            out.push(PresheafViolation::Composite {
                g: cat.arrow_name(g).to_string(),
                f: cat.arrow_name(f).to_string(),
            });
        }
    }
    out
}

/// Naturality and well-formedness check for a morphism between two
/// presheaves, by exhaustion; returns the offending arrow's name.
pub fn naturality_failure<P: Presheaf>(m: &P::Morphism, src: &P, tgt: &P) -> Option<String> {
    let cat = src.base();
    for f in cat.arrow_ids() {
        let (d, c) = (cat.source(f), cat.target(f));
        for x in 0..src.card(c) {
            let a = m.apply(d, src.restrict(f, x));
            let b = tgt.restrict(f, m.apply(c, x));
            if a != b {
                return Some(cat.arrow_name(f).to_string());
            }
        }
    }
    None
}

/// Componentwise bijective, hence invertible.
pub fn is_iso<P: Presheaf>(m: &P::Morphism, src: &P, tgt: &P) -> bool {
    src.base().objects().all(|c| {
        let n = src.card(c);
        if n != tgt.card(c) {
            return false;
        }
        let mut hit = vec![false; n];
        (0..n).all(|x| {
            let y = m.apply(c, x);
            !std::mem::replace(&mut hit[y], true)
        })
    })
}

/// True iff `p` and `q` admit a pair of mutually inverse morphisms.
pub fn isomorphic<P: Presheaf>(p: &P, q: &P) -> bool {
    p.isomorphism(q).is_some()
}

/// Total element count over all objects.
pub fn total_size<P: Presheaf>(p: &P) -> usize {
    p.base().objects().map(|c| p.card(c)).sum()
}
