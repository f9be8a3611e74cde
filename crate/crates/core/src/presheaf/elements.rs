use std::sync::Arc;

use super::Presheaf;
use crate::category::{Arrow, ArrowId, FinCategory, FunctorData, ObjId, Variance};
use crate::error::Result;

/// The category of elements of a presheaf with its projection to the base.
#[derive(Clone, Debug)]
pub struct ElementCategory {
    pub category: Arc<FinCategory>,
    pub projection: FunctorData,
    /// `(C, p)` for each object, in order.
    pub elements: Vec<(ObjId, usize)>,
    /// `(u, p)` for each arrow `(C', p . u) -> (C, p)`.
    pub arrows: Vec<(ArrowId, usize)>,
}

impl ElementCategory {
    pub fn object_of(&self, c: ObjId, p: usize) -> ObjId {
        ObjId(
            self.elements
                .iter()
                .position(|&e| e == (c, p))
                .expect("element"),
        )
    }
}

/// Objects `(C, p)` with `p` in `P(C)`; an arrow `(C', p') -> (C, p)` for
/// each `u: C' -> C` with `p . u = p'`.
pub fn category_of_elements<P: Presheaf>(p: &P) -> Result<ElementCategory> {
    let base = p.base();
    let mut obj_offset = Vec::with_capacity(base.num_objects());
    let mut elements = Vec::new();
    let mut objects = Vec::new();
    for c in base.objects() {
        obj_offset.push(elements.len());
        for x in 0..p.card(c) {
            elements.push((c, x));
            objects.push(format!("({},{})", base.object_name(c), p.label(c, x)));
        }
    }
    let obj = |c: ObjId, x: usize| ObjId(obj_offset[c.0] + x);
    let mut arrow_offset = Vec::with_capacity(base.num_arrows());
    let mut arrows = Vec::new();
    let mut arrow_data = Vec::new();
    for u in base.arrow_ids() {
        arrow_offset.push(arrows.len());
        let (s, t) = (base.source(u), base.target(u));
        for x in 0..p.card(t) {
            arrows.push((u, x));
            arrow_data.push(Arrow {
                name: format!("({},{})", base.arrow_name(u), p.label(t, x)),
                source: obj(s, p.restrict(u, x)),
                target: obj(t, x),
            });
        }
    }
    let at = |u: ArrowId, x: usize| ArrowId(arrow_offset[u.0] + x);
    let identities = elements
        .iter()
        .map(|&(c, x)| at(base.identity(c), x))
        .collect();
    let cat = FinCategory::from_parts(objects, arrow_data, identities, |g, f| {
        let (v, y) = arrows[g.0];
        let (u, _) = arrows[f.0];
        Some(at(base.comp(v, u), y))
    })?;
    let category = Arc::new(cat);
    let projection = FunctorData {
        domain: category.clone(),
        codomain: base.clone(),
        object_map: elements.iter().map(|e| e.0).collect(),
        arrow_map: arrows.iter().map(|a| a.0).collect(),
        variance: Variance::Covariant,
    };
    Ok(ElementCategory {
        category,
        projection,
        elements,
        arrows,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{yoneda_set, ModPresheaf, SetPresheaf};
    use super::*;
    use crate::category::fixtures::c2;
    use crate::modules::{FinModule, FinRing, ModuleHom};

    #[test]
    fn elements_of_representable() {
        let cat = Arc::new(c2());
        let v = cat.object_by_name("V").unwrap();
        let e = category_of_elements(&yoneda_set(&cat, v).unwrap()).unwrap();
        assert_eq!(e.category.num_objects(), 2);
        let nonid = e
            .category
            .arrow_ids()
            .filter(|&a| !e.category.is_identity(a))
            .count();
        assert_eq!(nonid, 1);
        assert!(e.category.validate().is_valid());
        assert!(e.projection.is_valid());
        let names: Vec<&str> = e
            .category
            .objects()
            .map(|o| e.category.object_name(o))
            .collect();
        assert_eq!(names, ["(U,i)", "(V,id_V)"]);
    }

    #[test]
    fn elements_of_point_is_base() {
        let cat = Arc::new(c2());
        let e = category_of_elements(&SetPresheaf::terminal(cat.clone())).unwrap();
        assert_eq!(e.category.num_objects(), cat.num_objects());
        assert_eq!(e.category.num_arrows(), cat.num_arrows());
        assert!(e.projection.is_valid());
    }

    #[test]
    fn elements_of_mod_presheaf_include_zero() {
        let cat = Arc::new(c2());
        let r = FinRing::cyclic(2).unwrap();
        let z2 = FinModule::new(&r, &[2]).unwrap();
        let zero = FinModule::zero(&r);
        let (u, v) = (
            cat.object_by_name("U").unwrap(),
            cat.object_by_name("V").unwrap(),
        );
        let mut values = vec![zero.clone(); 2];
        values[v.0] = z2.clone();
        let restrictions = cat
            .arrow_ids()
            .map(|f| ModuleHom::zero(&values[cat.target(f).0], &values[cat.source(f).0]))
            .map(|h| {
                if h.domain() == &z2 && h.codomain() == &z2 {
                    ModuleHom::identity(&z2)
                } else {
                    h
                }
            })
            .collect();
        let g = ModPresheaf::new(cat.clone(), &r, values, restrictions).unwrap();
        let e = category_of_elements(&g).unwrap();
        let mut elems = e.elements.clone();
        elems.sort();
        let mut expected = vec![(v, 0), (v, 1), (u, 0)];
        expected.sort();
        assert_eq!(elems, expected);
        assert!(e.category.validate().is_valid());
    }
}
