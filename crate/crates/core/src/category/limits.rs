//! Finite limits and colimits by exhaustive search.
//!
//! A limit is found by enumerating every cone over the diagram at every
//! object and keeping the first apex (in declaration order) through which
//! all cones factor uniquely. Colimits are limits in the opposite category.

use std::collections::HashSet;

use super::{ArrowId, FinCategory, ObjId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiagramEdge {
    pub from: usize,
    pub to: usize,
    pub arrow: ArrowId,
}

/// A finite diagram: a list of nodes (objects of the ambient category) and
/// generating edges between them. Identity and composite edges of the shape
/// never need to be listed; cones are constrained by the listed edges only.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Diagram {
    pub nodes: Vec<ObjId>,
    pub edges: Vec<DiagramEdge>,
}

impl Diagram {
    pub fn new(nodes: Vec<ObjId>) -> Self {
        Diagram {
            nodes,
            edges: Vec::new(),
        }
    }

    pub fn edge(mut self, from: usize, to: usize, arrow: ArrowId) -> Self {
        self.edges.push(DiagramEdge { from, to, arrow });
        self
    }

    pub fn opposite(&self) -> Diagram {
        Diagram {
            nodes: self.nodes.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| DiagramEdge {
                    from: e.to,
                    to: e.from,
                    arrow: e.arrow,
                })
                .collect(),
        }
    }

    pub fn is_well_formed(&self, cat: &FinCategory) -> bool {
        self.edges.iter().all(|e| {
            e.from < self.nodes.len()
                && e.to < self.nodes.len()
                && cat.source(e.arrow) == self.nodes[e.from]
                && cat.target(e.arrow) == self.nodes[e.to]
        })
    }
}

/// A cone (or, read in the opposite category, a cocone): one leg per node.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cone {
    pub apex: ObjId,
    pub legs: Vec<ArrowId>,
}

/// All cones over `d` with apex `x`, in lexicographic leg order.
pub(crate) fn cones_at(cat: &FinCategory, d: &Diagram, x: ObjId) -> Vec<Vec<ArrowId>> {
    let n = d.nodes.len();
    let mut out = Vec::new();
    let mut legs: Vec<ArrowId> = Vec::with_capacity(n);
    fn rec(
        cat: &FinCategory,
        d: &Diagram,
        x: ObjId,
        legs: &mut Vec<ArrowId>,
        out: &mut Vec<Vec<ArrowId>>,
    ) {
        let k = legs.len();
        if k == d.nodes.len() {
            out.push(legs.clone());
            return;
        }
        for &a in cat.hom(x, d.nodes[k]) {
            legs.push(a);
            let ok = d.edges.iter().all(|e| {
                if e.from.max(e.to) != k {
                    return true;
                }
                cat.comp(e.arrow, legs[e.from]) == legs[e.to]
            });
            if ok {
                rec(cat, d, x, legs, out);
            }
            legs.pop();
        }
    }
    if n == 0 {
        out.push(Vec::new());
        return out;
    }
    rec(cat, d, x, &mut legs, &mut out);
    out
}

/// First universal cone over `d` in declaration order, if any exists.
pub fn finite_limit(cat: &FinCategory, d: &Diagram) -> Option<Cone> {
    debug_assert!(d.is_well_formed(cat));
    let all: Vec<HashSet<Vec<ArrowId>>> = cat
        .objects()
        .map(|x| cones_at(cat, d, x).into_iter().collect())
        .collect();
    for l in cat.objects() {
        let mut candidates: Vec<&Vec<ArrowId>> = all[l.0].iter().collect();
        candidates.sort();
        'cand: for legs in candidates {
            for x in cat.objects() {
                let homs = cat.hom(x, l);
                if homs.len() != all[x.0].len() {
                    continue 'cand;
                }
                let mut seen = HashSet::with_capacity(homs.len());
                for &u in homs {
                    let image: Vec<ArrowId> = legs.iter().map(|&leg| cat.comp(leg, u)).collect();
                    if !seen.insert(image) {
                        continue 'cand;
                    }
                }
            }
            return Some(Cone {
                apex: l,
                legs: legs.clone(),
            });
        }
    }
    None
}

/// Independent universality check: every cone over `d` factors through
/// `cone` by exactly one arrow.
pub fn verify_limit(cat: &FinCategory, d: &Diagram, cone: &Cone) -> bool {
    if cone.legs.len() != d.nodes.len() {
        return false;
    }
    for (j, &leg) in cone.legs.iter().enumerate() {
        if cat.source(leg) != cone.apex || cat.target(leg) != d.nodes[j] {
            return false;
        }
    }
    if !d
        .edges
        .iter()
        .all(|e| cat.comp(e.arrow, cone.legs[e.from]) == cone.legs[e.to])
    {
        return false;
    }
    for x in cat.objects() {
        for other in cones_at(cat, d, x) {
            let count = cat
                .hom(x, cone.apex)
                .iter()
                .filter(|&&u| {
                    cone.legs
                        .iter()
                        .zip(&other)
                        .all(|(&l, &m)| cat.comp(l, u) == m)
                })
                .count();
            if count != 1 {
                return false;
            }
        }
    }
    true
}

/// The unique arrow from `other`'s apex into a limit cone, if it exists.
pub fn factor_through(cat: &FinCategory, limit: &Cone, other: &Cone) -> Option<ArrowId> {
    let mut found = None;
    for &u in cat.hom(other.apex, limit.apex) {
        if limit
            .legs
            .iter()
            .zip(&other.legs)
            .all(|(&l, &m)| cat.comp(l, u) == m)
        {
            if found.is_some() {
                return None;
            }
            found = Some(u);
        }
    }
    found
}

/// Colimit as a limit in the opposite category; legs point into the apex.
pub fn finite_colimit(cat: &FinCategory, d: &Diagram) -> Option<Cone> {
    finite_limit(&cat.opposite(), &d.opposite())
}

pub fn verify_colimit(cat: &FinCategory, d: &Diagram, cocone: &Cone) -> bool {
    verify_limit(&cat.opposite(), &d.opposite(), cocone)
}

pub fn factor_through_colimit(cat: &FinCategory, colimit: &Cone, other: &Cone) -> Option<ArrowId> {
    factor_through(&cat.opposite(), colimit, other)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pullback {
    pub apex: ObjId,
    pub p1: ArrowId,
    pub p2: ArrowId,
}

pub(crate) fn cospan(cat: &FinCategory, f: ArrowId, g: ArrowId) -> Diagram {
    Diagram::new(vec![cat.source(f), cat.source(g), cat.target(f)])
        .edge(0, 2, f)
        .edge(1, 2, g)
}

/// Pullback of `f: X -> Z` and `g: Y -> Z`.
pub fn pullback(cat: &FinCategory, f: ArrowId, g: ArrowId) -> Option<Pullback> {
    if cat.target(f) != cat.target(g) {
        return None;
    }
    finite_limit(cat, &cospan(cat, f, g)).map(|c| Pullback {
        apex: c.apex,
        p1: c.legs[0],
        p2: c.legs[1],
    })
}

pub fn kernel_pair(cat: &FinCategory, f: ArrowId) -> Option<Pullback> {
    pullback(cat, f, f)
}

/// Coequalizer of parallel `u, v: X -> Y`, as `(Q, q: Y -> Q)`.
pub fn coequalizer(cat: &FinCategory, u: ArrowId, v: ArrowId) -> Option<(ObjId, ArrowId)> {
    if cat.source(u) != cat.source(v) || cat.target(u) != cat.target(v) {
        return None;
    }
    let d = Diagram::new(vec![cat.source(u), cat.target(u)])
        .edge(0, 1, u)
        .edge(0, 1, v);
    finite_colimit(cat, &d).map(|c| (c.apex, c.legs[1]))
}

/// Equalizer of parallel `u, v: X -> Y`, as `(E, e: E -> X)`.
pub fn equalizer(cat: &FinCategory, u: ArrowId, v: ArrowId) -> Option<(ObjId, ArrowId)> {
    if cat.source(u) != cat.source(v) || cat.target(u) != cat.target(v) {
        return None;
    }
    let d = Diagram::new(vec![cat.source(u), cat.target(u)])
        .edge(0, 1, u)
        .edge(0, 1, v);
    finite_limit(cat, &d).map(|c| (c.apex, c.legs[0]))
}

pub fn product(cat: &FinCategory, objects: &[ObjId]) -> Option<Cone> {
    finite_limit(cat, &Diagram::new(objects.to_vec()))
}

pub fn coproduct(cat: &FinCategory, objects: &[ObjId]) -> Option<Cone> {
    finite_colimit(cat, &Diagram::new(objects.to_vec()))
}

pub fn initial_object(cat: &FinCategory) -> Option<ObjId> {
    finite_colimit(cat, &Diagram::default()).map(|c| c.apex)
}

pub fn terminal_object(cat: &FinCategory) -> Option<ObjId> {
    finite_limit(cat, &Diagram::default()).map(|c| c.apex)
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::CategoryBuilder;
    use super::*;

    #[test]
    fn c2_pullbacks() {
        let c = c2();
        let i = c.arrow_by_name("i").unwrap();
        let u = c.object_by_name("U").unwrap();
        let v = c.object_by_name("V").unwrap();
        let pb = pullback(&c, i, i).unwrap();
        assert_eq!(pb.apex, u);
        assert_eq!(pb.p1, c.identity(u));
        assert_eq!(pb.p2, c.identity(u));
        let idv = c.identity(v);
        assert_eq!(pullback(&c, idv, idv).unwrap().apex, v);
        assert_eq!(kernel_pair(&c, i), Some(pb));
    }

    #[test]
    fn c2_products_and_colimits() {
        let c = c2();
        let u = c.object_by_name("U").unwrap();
        let v = c.object_by_name("V").unwrap();
        assert_eq!(product(&c, &[u, v]).unwrap().apex, u);
        assert_eq!(initial_object(&c), Some(u));
        assert_eq!(terminal_object(&c), Some(v));
        let idv = c.identity(v);
        assert_eq!(equalizer(&c, idv, idv), Some((v, idv)));
        let idu = c.identity(u);
        assert_eq!(coequalizer(&c, idu, idu), Some((u, idu)));
    }

    #[test]
    fn missing_cone_is_absent() {
        // X -> Z <- Y with nothing mapping into both X and Y
        let c = CategoryBuilder::new()
            .objects(["X", "Y", "Z"])
            .arrow("f", "X", "Z")
            .arrow("g", "Y", "Z")
            .build()
            .unwrap();
        let f = c.arrow_by_name("f").unwrap();
        let g = c.arrow_by_name("g").unwrap();
        assert_eq!(pullback(&c, f, g), None);
    }

    #[test]
    fn limits_pass_independent_check() {
        let c = chain3();
        for f in c.arrow_ids() {
            for g in c.arrow_ids() {
                if c.target(f) != c.target(g) {
                    continue;
                }
                let d = cospan(&c, f, g);
                let cone = finite_limit(&c, &d).unwrap();
                assert!(verify_limit(&c, &d, &cone));
            }
        }
    }

    #[test]
    fn parallel_pair_has_no_coequalizer_or_equalizer() {
        let c = parallel_pair();
        let a = c.arrow_by_name("a").unwrap();
        let b = c.arrow_by_name("b").unwrap();
        assert_eq!(coequalizer(&c, a, b), None);
        assert_eq!(equalizer(&c, a, b), None);
    }
}
