use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::{all_sieves, pullback_sieve, sieve_generate, validate_basis, Basis, Sieve};
use crate::category::{FinCategory, ObjId};
use crate::error::{Error, Result};

/// Most arrows into a single object for which the sieve lattice is built.
pub const SIEVE_CAP: usize = 12;

/// Covering sieves, stored extensionally per object.
#[derive(Clone, Debug, PartialEq)]
pub struct GrothendieckTopology {
    base: Arc<FinCategory>,
    covers: Vec<BTreeSet<Sieve>>,
}

impl GrothendieckTopology {
    /// Checks the three axioms.
    pub fn new(base: Arc<FinCategory>, covers: Vec<BTreeSet<Sieve>>) -> Result<Self> {
        let t = Self::from_raw(base, covers)?;
        match verify_topology(&t).first() {
            None => Ok(t),
            Some(v) => Err(Error::InvalidTopology(v.to_string())),
        }
    }

    pub fn from_raw(base: Arc<FinCategory>, covers: Vec<BTreeSet<Sieve>>) -> Result<Self> {
        if covers.len() != base.num_objects() {
            return Err(Error::Mismatch(format!(
                "{} cover sets for {} objects",
                covers.len(),
                base.num_objects()
            )));
        }
        for (c, set) in covers.iter().enumerate() {
            if set.iter().any(|s| s.codomain.0 != c) {
                return Err(Error::Mismatch("sieve filed under the wrong object".into()));
            }
        }
        Ok(GrothendieckTopology { base, covers })
    }

    /// Only maximal sieves cover.
    pub fn trivial(base: Arc<FinCategory>) -> Self {
        let covers = base
            .objects()
            .map(|c| BTreeSet::from([Sieve::maximal(&base, c)]))
            .collect();
        GrothendieckTopology { base, covers }
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn covering(&self, c: ObjId) -> impl Iterator<Item = &Sieve> + '_ {
        self.covers[c.0].iter()
    }

    pub fn num_covering(&self, c: ObjId) -> usize {
        self.covers[c.0].len()
    }

    pub fn covers(&self, s: &Sieve) -> bool {
        self.covers[s.codomain.0].contains(s)
    }

    /// Pointwise inclusion of covering sets.
    pub fn is_coarser_than(&self, other: &GrothendieckTopology) -> bool {
        self.covers
            .iter()
            .zip(&other.covers)
            .all(|(a, b)| a.is_subset(b))
    }

    pub fn sieves(&self) -> Vec<Vec<Sieve>> {
        self.covers
            .iter()
            .map(|s| s.iter().cloned().collect())
            .collect()
    }
}

/// Least topology containing the seed sieves: worklist saturation under
/// maximality, pullback stability and transitivity.
pub fn saturate(base: &Arc<FinCategory>, seeds: Vec<Vec<Sieve>>) -> Result<GrothendieckTopology> {
    let cat = base.as_ref();
    let lattices: Vec<Vec<Sieve>> = cat
        .objects()
        .map(|c| all_sieves(cat, c, SIEVE_CAP))
        .collect::<Result<_>>()?;
    let mut covers: Vec<BTreeSet<Sieve>> = cat
        .objects()
        .map(|c| BTreeSet::from([Sieve::maximal(cat, c)]))
        .collect();
    for (c, list) in seeds.into_iter().enumerate() {
        for s in list {
            if s.codomain.0 != c || !s.is_closed(cat) {
                return Err(Error::Mismatch("seed is not a sieve on its object".into()));
            }
            covers[c].insert(s);
        }
    }
    let mut pending: Vec<Sieve> = covers.iter().flatten().cloned().collect();
    loop {
        while let Some(s) = pending.pop() {
            for &f in cat.arrows_into(s.codomain) {
                let p = pullback_sieve(cat, f, &s)?;
                if covers[p.codomain.0].insert(p.clone()) {
                    pending.push(p);
                }
            }
        }
        for c in cat.objects() {
            for t in &lattices[c.0] {
                if covers[c.0].contains(t) {
                    continue;
                }
                let reached = covers[c.0].iter().any(|s| {
                    s.arrows.iter().all(|&f| {
                        let p = pullback_sieve(cat, f, t).expect("typed");
                        covers[p.codomain.0].contains(&p)
                    })
                });
                if reached {
                    pending.push(t.clone());
                }
            }
        }
        if pending.is_empty() {
            break;
        }
        for s in &pending {
            covers[s.codomain.0].insert(s.clone());
        }
    }
    Ok(GrothendieckTopology {
        base: base.clone(),
        covers,
    })
}

/// The topology generated by a basis that passes [`validate_basis`].
pub fn generate_topology(basis: &Basis) -> Result<GrothendieckTopology> {
    let report = validate_basis(basis)?;
    if !report.is_valid() {
        return Err(Error::InvalidBasis(report.to_string()));
    }
    let cat = basis.base();
    let seeds = cat
        .objects()
        .map(|c| {
            basis
                .families(c)
                .iter()
                .map(|fam| sieve_generate(cat, fam))
                .collect()
        })
        .collect();
    saturate(cat, seeds)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TopologyViolation {
    NotASieve { object: String, sieve: String },
    MaximalMissing { object: String },
    NotStable { sieve: String, arrow: String },
    NotTransitive { object: String, sieve: String },
}

impl fmt::Display for TopologyViolation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologyViolation::NotASieve { object, sieve } => {
                write!(
                    out,
                    "{sieve} on {object} is not closed under precomposition"
                )
            }
            TopologyViolation::MaximalMissing { object } => {
                write!(out, "maximal sieve on {object} does not cover")
            }
            TopologyViolation::NotStable { sieve, arrow } => {
                write!(
                    out,
                    "pullback of covering {sieve} along {arrow} does not cover"
                )
            }
            TopologyViolation::NotTransitive { object, sieve } => {
                write!(
                    out,
                    "{sieve} on {object} is locally covering but not covering"
                )
            }
        }
    }
}

/// Re-checks the axioms directly from their definitions.
pub fn verify_topology(j: &GrothendieckTopology) -> Vec<TopologyViolation> {
    let cat = j.base.as_ref();
    let mut out = Vec::new();
    let show = |s: &Sieve| s.display(cat).to_string();
    for c in cat.objects() {
        let name = cat.object_name(c).to_string();
        for s in &j.covers[c.0] {
            if !s.is_closed(cat) {
                out.push(TopologyViolation::NotASieve {
                    object: name.clone(),
                    sieve: show(s),
                });
            }
        }
        let max: BTreeSet<_> = cat.arrows_into(c).iter().copied().collect();
        if !j.covers[c.0].iter().any(|s| s.arrows == max) {
            out.push(TopologyViolation::MaximalMissing {
                object: name.clone(),
            });
        }
        for s in &j.covers[c.0] {
            for &f in cat.arrows_into(c) {
                let d = cat.source(f);
                let arrows: BTreeSet<_> = cat
                    .arrows_into(d)
                    .iter()
                    .copied()
                    .filter(|&g| s.arrows.contains(&cat.comp(f, g)))
                    .collect();
                if !j.covers[d.0].iter().any(|t| t.arrows == arrows) {
                    out.push(TopologyViolation::NotStable {
                        sieve: show(s),
                        arrow: cat.arrow_name(f).to_string(),
                    });
                }
            }
        }
    }
    for c in cat.objects() {
        let Ok(lattice) = all_sieves(cat, c, SIEVE_CAP) else {
            continue;
        };
        for t in lattice {
            if j.covers[c.0].contains(&t) {
                continue;
            }
            let locally = j.covers[c.0].iter().any(|s| {
                s.arrows.iter().all(|&f| {
                    let d = cat.source(f);
                    let arrows: BTreeSet<_> = cat
                        .arrows_into(d)
                        .iter()
                        .copied()
                        .filter(|&g| t.arrows.contains(&cat.comp(f, g)))
                        .collect();
                    j.covers[d.0].iter().any(|u| u.arrows == arrows)
                })
            });
            if locally {
                out.push(TopologyViolation::NotTransitive {
                    object: cat.object_name(c).to_string(),
                    sieve: show(&t),
                });
            }
        }
    }
    out
}

/// Intersection of all covering sieves on `c`, which must itself cover.
pub fn min_cover(j: &GrothendieckTopology, c: ObjId) -> Result<Sieve> {
    let mut it = j.covering(c);
    let first = it
        .next()
        .ok_or_else(|| Error::InvalidTopology("no covering sieve".into()))?
        .clone();
    let m = it.fold(first, |acc, s| acc.intersection(s));
    if !j.covers(&m) {
        return Err(Error::InvalidTopology(format!(
            "intersection {} of covers on {} does not cover",
            m.display(&j.base),
            j.base.object_name(c)
        )));
    }
    Ok(m)
}
