//! Decision procedures for epis, monos, isos and generating sets.

use super::{ArrowId, FinCategory, ObjId};
use crate::error::{Error, Result};

/// A family of arrows sharing the codomain `codomain`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArrowFamily {
    pub codomain: ObjId,
    pub arrows: Vec<ArrowId>,
}

impl ArrowFamily {
    pub fn new(cat: &FinCategory, codomain: ObjId, arrows: Vec<ArrowId>) -> Result<Self> {
        for &a in &arrows {
            if cat.target(a) != codomain {
                return Err(Error::Mismatch(format!(
                    "arrow {} does not land in {}",
                    cat.arrow_name(a),
                    cat.object_name(codomain)
                )));
            }
        }
        Ok(ArrowFamily { codomain, arrows })
    }

    /// Same members regardless of order or repetition.
    pub fn same_members(&self, other: &ArrowFamily) -> bool {
        let mut a = self.arrows.clone();
        let mut b = other.arrows.clone();
        a.sort();
        a.dedup();
        b.sort();
        b.dedup();
        self.codomain == other.codomain && a == b
    }
}

pub fn is_epi(cat: &FinCategory, f: ArrowId) -> bool {
    let c = cat.target(f);
    is_epimorphic_family(
        cat,
        &ArrowFamily {
            codomain: c,
            arrows: vec![f],
        },
    )
}

pub fn is_mono(cat: &FinCategory, f: ArrowId) -> bool {
    let c = cat.source(f);
    for x in cat.objects() {
        let homs = cat.hom(x, c);
        for (i, &u) in homs.iter().enumerate() {
            for &v in &homs[i + 1..] {
                if cat.comp(f, u) == cat.comp(f, v) {
                    return false;
                }
            }
        }
    }
    true
}

pub fn is_iso(cat: &FinCategory, f: ArrowId) -> bool {
    inverse(cat, f).is_some()
}

pub fn inverse(cat: &FinCategory, f: ArrowId) -> Option<ArrowId> {
    let (s, t) = (cat.source(f), cat.target(f));
    cat.hom(t, s)
        .iter()
        .copied()
        .find(|&g| cat.comp(g, f) == cat.identity(s) && cat.comp(f, g) == cat.identity(t))
}

/// True iff any two parallel arrows out of the family's codomain that agree
/// after precomposing with every member are equal.
pub fn is_epimorphic_family(cat: &FinCategory, fam: &ArrowFamily) -> bool {
    let c = fam.codomain;
    for x in cat.objects() {
        let homs = cat.hom(c, x);
        for (i, &u) in homs.iter().enumerate() {
            for &v in &homs[i + 1..] {
                if fam.arrows.iter().all(|&f| cat.comp(u, f) == cat.comp(v, f)) {
                    return false;
                }
            }
        }
    }
    true
}

/// A distinct parallel pair not separated by any arrow out of `gens`.
pub fn separation_witness(cat: &FinCategory, gens: &[ObjId]) -> Option<(ArrowId, ArrowId)> {
    for x in cat.objects() {
        for y in cat.objects() {
            let homs = cat.hom(x, y);
            for (i, &u) in homs.iter().enumerate() {
                for &v in &homs[i + 1..] {
                    let separated = gens.iter().any(|&g| {
                        cat.hom(g, x)
                            .iter()
                            .any(|&f| cat.comp(u, f) != cat.comp(v, f))
                    });
                    if !separated {
                        return Some((u, v));
                    }
                }
            }
        }
    }
    None
}

pub fn generates(cat: &FinCategory, gens: &[ObjId]) -> bool {
    separation_witness(cat, gens).is_none()
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::{poset, CategoryBuilder};
    use super::*;

    #[test]
    fn c2_arrow_properties() {
        let c = c2();
        let i = c.arrow_by_name("i").unwrap();
        assert!(is_epi(&c, i));
        assert!(is_mono(&c, i));
        assert!(!is_iso(&c, i));
        let idv = c.arrow_by_name("id_V").unwrap();
        assert!(is_iso(&c, idv));
    }

    #[test]
    fn non_surjective_map_is_not_epi() {
        // finite sets {1}, {1,2} with all functions; e1, e2: 1 -> 2 pick points
        let c = CategoryBuilder::new()
            .objects(["one", "two"])
            .arrow("e1", "one", "two")
            .arrow("e2", "one", "two")
            .arrow("bang", "two", "one")
            .arrow("swap", "two", "two")
            .arrow("k1", "two", "two")
            .arrow("k2", "two", "two")
            .compose("bang", "e1", "id_one")
            .compose("bang", "e2", "id_one")
            .compose("e1", "bang", "k1")
            .compose("e2", "bang", "k2")
            .compose("swap", "e1", "e2")
            .compose("swap", "e2", "e1")
            .compose("swap", "swap", "id_two")
            .compose("swap", "k1", "k2")
            .compose("swap", "k2", "k1")
            .compose("k1", "swap", "k1")
            .compose("k2", "swap", "k2")
            .compose("k1", "k1", "k1")
            .compose("k1", "k2", "k1")
            .compose("k2", "k1", "k2")
            .compose("k2", "k2", "k2")
            .compose("k1", "e1", "e1")
            .compose("k1", "e2", "e1")
            .compose("k2", "e1", "e2")
            .compose("k2", "e2", "e2")
            .build()
            .unwrap();
        let e1 = c.arrow_by_name("e1").unwrap();
        let bang = c.arrow_by_name("bang").unwrap();
        assert!(!is_epi(&c, e1));
        assert!(is_mono(&c, e1));
        assert!(is_epi(&c, bang));
    }

    #[test]
    fn epimorphic_families() {
        let c = c2();
        let v = c.object_by_name("V").unwrap();
        let i = c.arrow_by_name("i").unwrap();
        assert!(is_epimorphic_family(
            &c,
            &ArrowFamily {
                codomain: v,
                arrows: vec![i]
            }
        ));
        assert!(is_epimorphic_family(
            &c,
            &ArrowFamily {
                codomain: v,
                arrows: vec![]
            }
        ));
        let p = parallel_pair();
        let pv = p.object_by_name("V").unwrap();
        assert!(!is_epimorphic_family(
            &p,
            &ArrowFamily {
                codomain: pv,
                arrows: vec![]
            }
        ));
    }

    #[test]
    fn generating_sets() {
        let c = c2();
        let u = c.object_by_name("U").unwrap();
        assert!(generates(&c, &[u]));
        let p = parallel_pair();
        let pu = p.object_by_name("U").unwrap();
        assert!(!generates(&p, &[pu]));
        let all: Vec<_> = p.objects().collect();
        assert!(generates(&p, &all));
        assert!(!generates(&p, &[]));
        let chain = poset(&["a", "b", "c"], |i, j| i < j).unwrap();
        assert!(generates(&chain, &[]));
    }
}
