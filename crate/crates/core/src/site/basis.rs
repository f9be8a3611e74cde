use std::fmt;
use std::sync::Arc;

use super::topology::SIEVE_CAP;
use crate::category::{
    full_subcategory, is_epimorphic_family, is_iso, pullback, separation_witness, ArrowFamily,
    ArrowId, FinCategory, FunctorData, ObjId,
};
use crate::error::{Error, Result};

/// Covering families per object.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis {
    base: Arc<FinCategory>,
    families: Vec<Vec<ArrowFamily>>,
}

fn normalize(mut fam: ArrowFamily) -> ArrowFamily {
    fam.arrows.sort();
    fam.arrows.dedup();
    fam
}

impl Basis {
    /// Groups families by codomain and adds the singleton family of every
    /// isomorphism, so that the isomorphism clause holds by construction.
    pub fn new(base: Arc<FinCategory>, families: Vec<ArrowFamily>) -> Result<Basis> {
        let mut b = Self::from_raw(base, families)?;
        let cat = b.base.clone();
        for f in cat.arrow_ids() {
            if is_iso(&cat, f) {
                b.insert(ArrowFamily {
                    codomain: cat.target(f),
                    arrows: vec![f],
                });
            }
        }
        Ok(b)
    }

    /// Takes the families as given.
    pub fn from_raw(base: Arc<FinCategory>, families: Vec<ArrowFamily>) -> Result<Basis> {
        let mut b = Basis {
            families: vec![Vec::new(); base.num_objects()],
            base,
        };
        for fam in families {
            if fam.codomain.0 >= b.base.num_objects() {
                return Err(Error::UnknownObject(format!("#{}", fam.codomain.0)));
            }
            let fam = ArrowFamily::new(&b.base, fam.codomain, fam.arrows)?;
            b.insert(fam);
        }
        Ok(b)
    }

    /// Adds a family; returns false if it was present.
    pub(crate) fn insert(&mut self, fam: ArrowFamily) -> bool {
        let fam = normalize(fam);
        let list = &mut self.families[fam.codomain.0];
        match list.binary_search(&fam) {
            Ok(_) => false,
            Err(pos) => {
                list.insert(pos, fam);
                true
            }
        }
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn families(&self, c: ObjId) -> &[ArrowFamily] {
        &self.families[c.0]
    }

    pub fn contains(&self, fam: &ArrowFamily) -> bool {
        self.families[fam.codomain.0]
            .binary_search(&normalize(fam.clone()))
            .is_ok()
    }

    pub fn len(&self) -> usize {
        self.families.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn family_name(&self, fam: &ArrowFamily) -> String {
        let names: Vec<&str> = fam
            .arrows
            .iter()
            .map(|&a| self.base.arrow_name(a))
            .collect();
        format!("{{{}}}", names.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BasisViolation {
    /// Clause 1: the singleton family of an isomorphism is missing.
    IsoNotCovering { object: String, arrow: String },
    /// Clause 2 cannot be checked: `f` has no pullback along `g`.
    MissingPullback {
        family: String,
        f: String,
        g: String,
    },
    /// Clause 2: the base change of `family` along `g` is not a member.
    NotStable {
        family: String,
        g: String,
        pulled: String,
    },
    /// Clause 3: a composite of covering families is not a member.
    NotTransitive { family: String, composite: String },
}

impl fmt::Display for BasisViolation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisViolation::IsoNotCovering { object, arrow } => {
                write!(out, "isomorphism {arrow} does not cover {object}")
            }
            BasisViolation::MissingPullback { family, f, g } => {
                write!(out, "{family}: no pullback of {f} along {g}")
            }
            BasisViolation::NotStable { family, g, pulled } => {
                write!(
                    out,
                    "{family} pulled back along {g} gives {pulled}, not a covering family"
                )
            }
            BasisViolation::NotTransitive { family, composite } => {
                write!(
                    out,
                    "composite {composite} over {family} is not a covering family"
                )
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BasisReport {
    pub violations: Vec<BasisViolation>,
}

impl BasisReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// Clause numbers (1-3) that failed, without repetition.
    pub fn failed_clauses(&self) -> Vec<u8> {
        let mut out: Vec<u8> = self
            .violations
            .iter()
            .map(|v| match v {
                BasisViolation::IsoNotCovering { .. } => 1,
                BasisViolation::MissingPullback { .. } | BasisViolation::NotStable { .. } => 2,
                BasisViolation::NotTransitive { .. } => 3,
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

impl fmt::Display for BasisReport {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(out, "basis valid");
        }
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                writeln!(out)?;
            }
            write!(out, "{v}")?;
        }
        Ok(())
    }
}

/// Base change of `fam` along `g`, one pullback projection per member.
fn pulled_family(
    cat: &FinCategory,
    fam: &ArrowFamily,
    g: ArrowId,
) -> std::result::Result<ArrowFamily, ArrowId> {
    let mut arrows = Vec::new();
    for &f in &fam.arrows {
        match pullback(cat, f, g) {
            Some(p) => arrows.push(p.p2),
            None => return Err(f),
        }
    }
    Ok(normalize(ArrowFamily {
        codomain: cat.source(g),
        arrows,
    }))
}

/// Limit on the number of composite families inspected per family.
const COMPOSITE_CAP: usize = 1 << 16;

/// Calls `visit` with every composite `{f_i o g | g in G_i}` for choices
/// `G_i` in `K(source f_i)`; stops early when `visit` returns false.
fn for_each_composite(
    b: &Basis,
    fam: &ArrowFamily,
    mut visit: impl FnMut(ArrowFamily) -> bool,
) -> Result<()> {
    let cat = &b.base;
    let choices: Vec<&[ArrowFamily]> = fam
        .arrows
        .iter()
        .map(|&f| b.families(cat.source(f)))
        .collect();
    let total = choices
        .iter()
        .try_fold(1usize, |acc, c| acc.checked_mul(c.len()));
    match total {
        Some(t) if t <= COMPOSITE_CAP => {}
        _ => {
            return Err(Error::TooLarge(format!(
                "composites over {} exceed {COMPOSITE_CAP}",
                b.family_name(fam)
            )))
        }
    }
    if choices.iter().any(|c| c.is_empty()) {
        return Ok(());
    }
    let mut idx = vec![0usize; choices.len()];
    loop {
        let mut arrows = Vec::new();
        for (k, &f) in fam.arrows.iter().enumerate() {
            arrows.extend(choices[k][idx[k]].arrows.iter().map(|&g| cat.comp(f, g)));
        }
        if !visit(normalize(ArrowFamily {
            codomain: fam.codomain,
            arrows,
        })) {
            return Ok(());
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(());
            }
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Checks the three basis clauses: isomorphisms cover, stability under
/// base change along every arrow, closure under composition of covers.
pub fn validate_basis(b: &Basis) -> Result<BasisReport> {
    let cat = &b.base;
    let mut violations = Vec::new();
    for f in cat.arrow_ids() {
        let single = ArrowFamily {
            codomain: cat.target(f),
            arrows: vec![f],
        };
        if is_iso(cat, f) && !b.contains(&single) {
            violations.push(BasisViolation::IsoNotCovering {
                object: cat.object_name(cat.target(f)).to_string(),
                arrow: cat.arrow_name(f).to_string(),
            });
        }
    }
    for c in cat.objects() {
        for fam in b.families(c) {
            for &g in cat.arrows_into(c) {
                match pulled_family(cat, fam, g) {
                    Err(f) => violations.push(BasisViolation::MissingPullback {
                        family: b.family_name(fam),
                        f: cat.arrow_name(f).to_string(),
                        g: cat.arrow_name(g).to_string(),
                    }),
                    Ok(p) if !b.contains(&p) => violations.push(BasisViolation::NotStable {
                        family: b.family_name(fam),
                        g: cat.arrow_name(g).to_string(),
                        pulled: b.family_name(&p),
                    }),
                    Ok(_) => {}
                }
            }
        }
    }
    for c in cat.objects() {
        for fam in b.families(c) {
            for_each_composite(b, fam, |comp| {
                if b.contains(&comp) {
                    true
                } else {
                    violations.push(BasisViolation::NotTransitive {
                        family: b.family_name(fam),
                        composite: b.family_name(&comp),
                    });
                    false
                }
            })?;
        }
    }
    Ok(BasisReport { violations })
}

/// Limit on the number of families produced by [`close_basis`].
const CLOSURE_CAP: usize = 4096;

/// The least basis containing `families` that satisfies all three clauses;
/// base changes along arrows without pullbacks are skipped.
pub fn close_basis(base: Arc<FinCategory>, families: Vec<ArrowFamily>) -> Result<Basis> {
    let mut b = Basis::new(base, families)?;
    let cat = b.base.clone();
    loop {
        let mut fresh = Vec::new();
        for c in cat.objects() {
            for fam in b.families(c) {
                for &g in cat.arrows_into(c) {
                    if let Ok(p) = pulled_family(&cat, fam, g) {
                        if !b.contains(&p) {
                            fresh.push(p);
                        }
                    }
                }
                for_each_composite(&b, fam, |comp| {
                    if !b.contains(&comp) {
                        fresh.push(comp);
                    }
                    true
                })?;
            }
        }
        let mut changed = false;
        for fam in fresh {
            changed |= b.insert(fam);
        }
        if b.len() > CLOSURE_CAP {
            return Err(Error::TooLarge(format!(
                "basis closure exceeds {CLOSURE_CAP} families"
            )));
        }
        if !changed {
            return Ok(b);
        }
    }
}

/// A generating full subcategory with its inclusion and the basis of
/// ambient-epimorphic families.
#[derive(Clone, Debug)]
pub struct EpimorphicSite {
    pub site: Arc<FinCategory>,
    pub inclusion: FunctorData,
    pub basis: Basis,
}

/// `K(C)` = every family of site arrows into `C` (of at most `max_size`
/// members) that is epimorphic in the ambient category.
pub fn epimorphic_basis(
    ambient: &Arc<FinCategory>,
    gens: &[ObjId],
    max_size: Option<usize>,
) -> Result<EpimorphicSite> {
    if let Some((u, v)) = separation_witness(ambient, gens) {
        return Err(Error::NotGenerating {
            u: ambient.arrow_name(u).to_string(),
            v: ambient.arrow_name(v).to_string(),
        });
    }
    let (site, inclusion) = full_subcategory(ambient, gens)?;
    let mut families = Vec::new();
    for c in site.objects() {
        let into = site.arrows_into(c);
        if into.len() > SIEVE_CAP {
            return Err(Error::BoundExceeded {
                object: site.object_name(c).to_string(),
                count: into.len(),
                cap: SIEVE_CAP,
            });
        }
        let limit = max_size.unwrap_or(into.len());
        for mask in 0u32..(1u32 << into.len()) {
            if mask.count_ones() as usize > limit {
                continue;
            }
            let arrows: Vec<ArrowId> = (0..into.len())
                .filter(|k| mask >> k & 1 == 1)
                .map(|k| into[k])
                .collect();
            let image = ArrowFamily {
                codomain: inclusion.map_object(c),
                arrows: arrows.iter().map(|&a| inclusion.map_arrow(a)).collect(),
            };
            if is_epimorphic_family(ambient, &image) {
                families.push(ArrowFamily {
                    codomain: c,
                    arrows,
                });
            }
        }
    }
    let basis = Basis::from_raw(site.clone(), families)?;
    Ok(EpimorphicSite {
        site,
        inclusion,
        basis,
    })
}
