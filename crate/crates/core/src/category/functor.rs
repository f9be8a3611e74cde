use std::sync::Arc;

use super::{Arrow, ArrowId, Diagram, FinCategory, ObjId};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variance {
    Covariant,
    Contravariant,
}

/// Object and arrow maps between two finite categories.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctorData {
    pub domain: Arc<FinCategory>,
    pub codomain: Arc<FinCategory>,
    pub object_map: Vec<ObjId>,
    pub arrow_map: Vec<ArrowId>,
    pub variance: Variance,
}

impl FunctorData {
    pub fn identity(cat: Arc<FinCategory>) -> Self {
        FunctorData {
            object_map: cat.objects().collect(),
            arrow_map: cat.arrow_ids().collect(),
            domain: cat.clone(),
            codomain: cat,
            variance: Variance::Covariant,
        }
    }

    pub fn map_object(&self, o: ObjId) -> ObjId {
        self.object_map[o.0]
    }

    pub fn map_arrow(&self, a: ArrowId) -> ArrowId {
        self.arrow_map[a.0]
    }

    /// Lists every identity, endpoint or composition law the maps break.
    pub fn violations(&self) -> Vec<String> {
        let (d, c) = (&*self.domain, &*self.codomain);
        let mut out = Vec::new();
        if self.object_map.len() != d.num_objects() || self.arrow_map.len() != d.num_arrows() {
            out.push("map sizes do not match the domain".to_string());
            return out;
        }
        for o in d.objects() {
            if self.map_arrow(d.identity(o)) != c.identity(self.map_object(o)) {
                out.push(format!("identity of {} not preserved", d.object_name(o)));
            }
        }
        for a in d.arrow_ids() {
            let fa = self.map_arrow(a);
            let (s, t) = (self.map_object(d.source(a)), self.map_object(d.target(a)));
            let (es, et) = match self.variance {
                Variance::Covariant => (s, t),
                Variance::Contravariant => (t, s),
            };
            if c.source(fa) != es || c.target(fa) != et {
                out.push(format!("endpoints of {} not preserved", d.arrow_name(a)));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for (g, f) in d.composable_pairs() {
            let lhs = self.map_arrow(d.comp(g, f));
            let rhs = match self.variance {
                Variance::Covariant => c.comp(self.map_arrow(g), self.map_arrow(f)),
                Variance::Contravariant => c.comp(self.map_arrow(f), self.map_arrow(g)),
            };
            if lhs != rhs {
                out.push(format!(
                    "composite {} o {} not preserved",
                    d.arrow_name(g),
                    d.arrow_name(f)
                ));
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.violations().is_empty()
    }

    /// The image of a covariant functor as a diagram indexed by the domain's
    /// objects, with one edge per non-identity arrow.
    pub fn to_diagram(&self) -> Diagram {
        assert_eq!(self.variance, Variance::Covariant);
        let d = &*self.domain;
        let mut diagram = Diagram::new(self.object_map.clone());
        for a in d.arrow_ids().filter(|&a| !d.is_identity(a)) {
            diagram = diagram.edge(d.source(a).0, d.target(a).0, self.map_arrow(a));
        }
        diagram
    }
}

/// The full subcategory on `objects` (kept in ambient declaration order)
/// together with its inclusion functor.
pub fn full_subcategory(
    cat: &Arc<FinCategory>,
    objects: &[ObjId],
) -> Result<(Arc<FinCategory>, FunctorData)> {
    let mut chosen: Vec<ObjId> = objects.to_vec();
    for &o in &chosen {
        if o.0 >= cat.num_objects() {
            return Err(Error::UnknownObject(format!("#{}", o.0)));
        }
    }
    chosen.sort();
    chosen.dedup();
    let mut new_index = vec![None; cat.num_objects()];
    for (k, o) in chosen.iter().enumerate() {
        new_index[o.0] = Some(ObjId(k));
    }
    let mut arrows = Vec::new();
    let mut arrow_map = Vec::new();
    let mut arrow_index = vec![None; cat.num_arrows()];
    for a in cat.arrow_ids() {
        if let (Some(s), Some(t)) = (new_index[cat.source(a).0], new_index[cat.target(a).0]) {
            arrow_index[a.0] = Some(ArrowId(arrows.len()));
            arrows.push(Arrow {
                name: cat.arrow_name(a).to_string(),
                source: s,
                target: t,
            });
            arrow_map.push(a);
        }
    }
    let names = chosen
        .iter()
        .map(|&o| cat.object_name(o).to_string())
        .collect();
    let identities = chosen
        .iter()
        .map(|&o| arrow_index[cat.identity(o).0].unwrap())
        .collect();
    let sub = FinCategory::from_parts(names, arrows, identities, |g, f| {
        arrow_index[cat.comp(arrow_map[g.0], arrow_map[f.0]).0]
    })?;
    let sub = Arc::new(sub);
    let inclusion = FunctorData {
        domain: sub.clone(),
        codomain: cat.clone(),
        object_map: chosen,
        arrow_map,
        variance: super::Variance::Covariant,
    };
    Ok((sub, inclusion))
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::{generates, poset};
    use super::*;

    #[test]
    fn full_subcategories() {
        let c = Arc::new(c2());
        let u = c.object_by_name("U").unwrap();
        let v = c.object_by_name("V").unwrap();
        let (sub, inc) = full_subcategory(&c, &[u]).unwrap();
        assert_eq!(sub.num_objects(), 1);
        assert_eq!(sub.num_arrows(), 1);
        assert!(inc.is_valid());
        let (sub, inc) = full_subcategory(&c, &[v, u]).unwrap();
        assert_eq!(*sub, *c);
        assert_eq!(inc, FunctorData::identity(c.clone()));
        assert!(full_subcategory(&c, &[ObjId(7)]).is_err());
    }

    #[test]
    fn induced_subposet() {
        let p = Arc::new(poset(&["a", "b", "c", "d"], |i, j| i < j).unwrap());
        let (sub, inc) = full_subcategory(&p, &[ObjId(1), ObjId(3)]).unwrap();
        assert_eq!(sub.num_arrows(), 3);
        assert_eq!(sub.arrow_name(ArrowId(2)), "b_d");
        assert!(inc.is_valid());
        let all: Vec<_> = sub.objects().collect();
        assert!(generates(&sub, &all));
    }

    #[test]
    fn broken_functor_is_reported() {
        let c = Arc::new(c2());
        let mut f = FunctorData::identity(c.clone());
        let i = c.arrow_by_name("i").unwrap();
        f.arrow_map[i.0] = c.arrow_by_name("id_V").unwrap();
        assert!(!f.violations().is_empty());
    }
}
