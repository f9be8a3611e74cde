//! Sieves, bases and Grothendieck topologies on a finite category.

mod basis;
mod topology;

use std::collections::BTreeSet;
use std::fmt;

use crate::category::{ArrowFamily, ArrowId, FinCategory, ObjId};
use crate::error::{Error, Result};

pub use basis::{
    close_basis, epimorphic_basis, validate_basis, Basis, BasisReport, BasisViolation,
    EpimorphicSite,
};
pub use topology::{
    generate_topology, min_cover, saturate, verify_topology, GrothendieckTopology,
    TopologyViolation, SIEVE_CAP,
};

/// A set of arrows into `codomain`, closed under precomposition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sieve {
    pub codomain: ObjId,
    pub arrows: BTreeSet<ArrowId>,
}

impl Sieve {
    pub fn maximal(cat: &FinCategory, c: ObjId) -> Sieve {
        Sieve {
            codomain: c,
            arrows: cat.arrows_into(c).iter().copied().collect(),
        }
    }

    pub fn empty(c: ObjId) -> Sieve {
        Sieve {
            codomain: c,
            arrows: BTreeSet::new(),
        }
    }

    /// Checks targets and precomposition closure.
    pub fn new(
        cat: &FinCategory,
        c: ObjId,
        arrows: impl IntoIterator<Item = ArrowId>,
    ) -> Result<Sieve> {
        let s = Sieve {
            codomain: c,
            arrows: arrows.into_iter().collect(),
        };
        for &f in &s.arrows {
            if cat.target(f) != c {
                return Err(Error::Mismatch(format!(
                    "{} does not land in {}",
                    cat.arrow_name(f),
                    cat.object_name(c)
                )));
            }
        }
        if !s.is_closed(cat) {
            return Err(Error::Mismatch(
                "arrow set is not closed under precomposition".into(),
            ));
        }
        Ok(s)
    }

    pub fn contains(&self, f: ArrowId) -> bool {
        self.arrows.contains(&f)
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn is_maximal(&self, cat: &FinCategory) -> bool {
        self.arrows.len() == cat.arrows_into(self.codomain).len()
    }

    pub fn is_closed(&self, cat: &FinCategory) -> bool {
        self.arrows.iter().all(|&f| {
            cat.arrows_into(cat.source(f))
                .iter()
                .all(|&g| self.contains(cat.comp(f, g)))
        })
    }

    pub fn intersection(&self, other: &Sieve) -> Sieve {
        Sieve {
            codomain: self.codomain,
            arrows: self.arrows.intersection(&other.arrows).copied().collect(),
        }
    }

    pub fn is_subset(&self, other: &Sieve) -> bool {
        self.codomain == other.codomain && self.arrows.is_subset(&other.arrows)
    }

    pub fn display<'a>(&'a self, cat: &'a FinCategory) -> SieveDisplay<'a> {
        SieveDisplay { sieve: self, cat }
    }
}

pub struct SieveDisplay<'a> {
    sieve: &'a Sieve,
    cat: &'a FinCategory,
}

impl fmt::Display for SieveDisplay<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self
            .sieve
            .arrows
            .iter()
            .map(|&a| self.cat.arrow_name(a))
            .collect();
        write!(out, "{{{}}}", names.join(", "))
    }
}

/// The smallest sieve containing the family.
pub fn sieve_generate(cat: &FinCategory, fam: &ArrowFamily) -> Sieve {
    let mut arrows = BTreeSet::new();
    for &f in &fam.arrows {
        for &g in cat.arrows_into(cat.source(f)) {
            arrows.insert(cat.comp(f, g));
        }
    }
    Sieve {
        codomain: fam.codomain,
        arrows,
    }
}

/// `f^* S = { g | f o g in S }` for `f: D -> C`.
pub fn pullback_sieve(cat: &FinCategory, f: ArrowId, s: &Sieve) -> Result<Sieve> {
    if cat.target(f) != s.codomain {
        return Err(Error::Mismatch(format!(
            "{} does not land in the sieve's object {}",
            cat.arrow_name(f),
            cat.object_name(s.codomain)
        )));
    }
    let d = cat.source(f);
    Ok(Sieve {
        codomain: d,
        arrows: cat
            .arrows_into(d)
            .iter()
            .copied()
            .filter(|&g| s.contains(cat.comp(f, g)))
            .collect(),
    })
}

/// Every sieve on `c`, ordered by size then members; refuses more than
/// `cap` arrows into `c`.
pub fn all_sieves(cat: &FinCategory, c: ObjId, cap: usize) -> Result<Vec<Sieve>> {
    let into = cat.arrows_into(c);
    if into.len() > cap {
        return Err(Error::BoundExceeded {
            object: cat.object_name(c).to_string(),
            count: into.len(),
            cap,
        });
    }
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << into.len()) {
        let s = Sieve {
            codomain: c,
            arrows: (0..into.len())
                .filter(|k| mask >> k & 1 == 1)
                .map(|k| into[k])
                .collect(),
        };
        if s.is_closed(cat) {
            out.push(s);
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.arrows.cmp(&b.arrows)));
    Ok(out)
}

/// The site fixture on [`c2`](crate::category::fixtures::c2): `{i}` covers `V`.
pub mod fixtures {
    use std::sync::Arc;

    use super::{generate_topology, Basis, GrothendieckTopology};
    use crate::category::{fixtures::c2, ArrowFamily, FinCategory};

    pub fn j2_basis(cat: &Arc<FinCategory>) -> Basis {
        let (u, v) = (
            cat.object_by_name("U").unwrap(),
            cat.object_by_name("V").unwrap(),
        );
        let i = cat.arrow_by_name("i").unwrap();
        Basis::new(
            cat.clone(),
            vec![
                ArrowFamily {
                    codomain: v,
                    arrows: vec![i],
                },
                ArrowFamily {
                    codomain: u,
                    arrows: vec![cat.identity(u)],
                },
            ],
        )
        .unwrap()
    }

    pub fn j2() -> (Arc<FinCategory>, GrothendieckTopology) {
        let cat = Arc::new(c2());
        let j = generate_topology(&j2_basis(&cat)).unwrap();
        (cat, j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::fixtures::{c2, chain3};

    #[test]
    fn generate_on_c2() {
        let cat = c2();
        let (u, v) = (
            cat.object_by_name("U").unwrap(),
            cat.object_by_name("V").unwrap(),
        );
        let i = cat.arrow_by_name("i").unwrap();
        let s = sieve_generate(&cat, &ArrowFamily::new(&cat, v, vec![i]).unwrap());
        assert_eq!(s.arrows.iter().copied().collect::<Vec<_>>(), vec![i]);
        let m = sieve_generate(
            &cat,
            &ArrowFamily::new(&cat, v, vec![cat.identity(v)]).unwrap(),
        );
        assert!(m.is_maximal(&cat));
        assert!(sieve_generate(
            &cat,
            &ArrowFamily {
                codomain: v,
                arrows: vec![]
            }
        )
        .is_empty());
        let back = pullback_sieve(&cat, i, &s).unwrap();
        assert!(back.is_maximal(&cat) && back.codomain == u);
        assert_eq!(pullback_sieve(&cat, cat.identity(v), &s).unwrap(), s);
        assert!(pullback_sieve(&cat, i, &Sieve::maximal(&cat, v))
            .unwrap()
            .is_maximal(&cat));
    }

    #[test]
    fn sieve_lattices() {
        let cat = chain3();
        let v = cat.object_by_name("V").unwrap();
        // sieves on the top of a 3-chain are down-sets of the chain
        assert_eq!(all_sieves(&cat, v, 12).unwrap().len(), 4);
        assert!(all_sieves(&cat, v, 2).is_err());
        assert!(Sieve::new(&cat, v, [cat.identity(v)]).is_err());
    }
}
