//! Executable checks of Giraud's conditions on finite slices of a category:
//! an explicit finite category, bounded finite modules over a ring, or a
//! bounded presheaf category.
//!
//! Every report states its bound and whether the slice was exhausted.
//! A [`Finding`] carries a witness that [`Auditor::replay`] re-checks alone.

mod finite;
mod fin_mod;

use std::fmt;
use std::sync::atomic::AtomicBool;
use std::sync::Arc;

use crate::category::{ArrowId, FinCategory, ObjId};
use crate::error::{Error, Result};
use crate::materialize::{materialize, Bounds, BoundedPresheafCategory};
use crate::modules::{FinModule, FinRing, ModuleHom};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    Coproducts,
    EpiCoequalizer,
    EquivalenceRelations,
    ExactForks,
    Generators,
}

impl Axiom {
    pub const ALL: [Axiom; 5] = [
        Axiom::Coproducts,
        Axiom::EpiCoequalizer,
        Axiom::EquivalenceRelations,
        Axiom::ExactForks,
        Axiom::Generators,
    ];

    pub fn numeral(self) -> &'static str {
        match self {
            Axiom::Coproducts => "i",
            Axiom::EpiCoequalizer => "ii",
            Axiom::EquivalenceRelations => "iii",
            Axiom::ExactForks => "iv",
            Axiom::Generators => "v",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Coproducts => "coproducts",
            Axiom::EpiCoequalizer => "epi-coequalizer",
            Axiom::EquivalenceRelations => "equivalence-relations",
            Axiom::ExactForks => "exact-forks",
            Axiom::Generators => "generators",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) {}", self.numeral(), self.name())
    }
}

#[derive(Clone, Debug)]
pub enum AuditTarget {
    Abstract(Arc<FinCategory>),
    /// Modules with at most `max_elements` elements, one per iso class.
    FinMod { ring: FinRing, max_elements: usize },
    /// Set-valued presheaves with values of size at most `value_size`.
    Presheaf { base: Arc<FinCategory>, value_size: usize },
}

#[derive(Clone, Debug)]
pub struct AuditScope {
    pub target: AuditTarget,
    pub axioms: Vec<Axiom>,
    /// Hom-sets larger than this are sampled instead of enumerated.
    pub hom_cap: usize,
    /// Forks sampled by the exact-fork audit on module scopes.
    pub fork_samples: usize,
    pub seed: u64,
}

impl AuditScope {
    pub fn new(target: AuditTarget) -> Self {
        AuditScope { target, axioms: Axiom::ALL.to_vec(), hom_cap: 64, fork_samples: 12, seed: 0 }
    }

    pub fn with_axioms(mut self, axioms: &[Axiom]) -> Self {
        self.axioms = axioms.to_vec();
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.hom_cap == 0 || self.fork_samples == 0 {
            return Err(Error::Mismatch("audit bounds must be positive".into()));
        }
        match &self.target {
            AuditTarget::Abstract(cat) | AuditTarget::Presheaf { base: cat, .. } => {
                let report = cat.validate();
                if !report.is_valid() {
                    return Err(Error::InvalidCategory(report));
                }
            }
            AuditTarget::FinMod { .. } => {}
        }
        match self.target {
            AuditTarget::FinMod { max_elements: 0, .. } | AuditTarget::Presheaf { value_size: 0, .. } => {
                Err(Error::Mismatch("audit bounds must be positive".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn bound(&self) -> Option<usize> {
        match self.target {
            AuditTarget::Abstract(_) => None,
            AuditTarget::FinMod { max_elements, .. } => Some(max_elements),
            AuditTarget::Presheaf { value_size, .. } => Some(value_size),
        }
    }

    pub fn describe(&self) -> String {
        match &self.target {
            AuditTarget::Abstract(cat) => format!("category with {} objects", cat.num_objects()),
            AuditTarget::FinMod { ring, max_elements } => format!("{ring}-modules with <= {max_elements} elements"),
            AuditTarget::Presheaf { base, value_size } => {
                format!("presheaves on {} objects with values of size <= {value_size}", base.num_objects())
            }
        }
    }
}

/// Objects or arrows of the audited category, or module data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Abstract { objects: Vec<ObjId>, arrows: Vec<ArrowId> },
    Module { modules: Vec<FinModule>, maps: Vec<ModuleHom> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Finding {
    pub witness: Witness,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    pub axiom: Axiom,
    pub scope: String,
    pub bound: Option<usize>,
    pub exhaustive: bool,
    pub checked: usize,
    /// Instances skipped because a limit or colimit the axiom presupposes
    /// is missing from the slice.
    pub hypothesis_failures: Vec<Finding>,
    pub violations: Vec<Finding>,
    pub notes: Vec<String>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} ({} checked, {} violations, {} hypothesis failures{}{})",
            self.axiom,
            if self.passed() { "pass" } else { "FAIL" },
            self.checked,
            self.violations.len(),
            self.hypothesis_failures.len(),
            self.bound.map(|b| format!(", bound {b}")).unwrap_or_default(),
            if self.exhaustive { "" } else { ", sampled" },
        )?;
        for v in &self.violations {
            write!(f, "\n  violation: {}", v.detail)?;
        }
        for n in &self.notes {
            write!(f, "\n  note: {n}")?;
        }
        Ok(())
    }
}

/// Result of checking one witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Outcome {
    Pass,
    /// The witness is not an instance of the axiom's hypothesis.
    Skip,
    Hypothesis(String),
    Violation(String),
}

pub(crate) struct Tally {
    report: AuditReport,
}

impl Tally {
    fn new(axiom: Axiom, scope: &AuditScope) -> Self {
        Tally {
            report: AuditReport {
                axiom,
                scope: scope.describe(),
                bound: scope.bound(),
                exhaustive: true,
                checked: 0,
                hypothesis_failures: Vec::new(),
                violations: Vec::new(),
                notes: Vec::new(),
            },
        }
    }

    fn record(&mut self, outcome: Outcome, witness: impl FnOnce() -> Witness) {
        match outcome {
            Outcome::Skip => {}
            Outcome::Pass => self.report.checked += 1,
            Outcome::Hypothesis(detail) => {
                self.report.hypothesis_failures.push(Finding { witness: witness(), detail })
            }
            Outcome::Violation(detail) => {
                self.report.checked += 1;
                self.report.violations.push(Finding { witness: witness(), detail })
            }
        }
    }

    fn sampled(&mut self) {
        self.report.exhaustive = false;
    }

    fn note(&mut self, note: impl Into<String>) {
        self.report.notes.push(note.into());
    }

    fn finish(self) -> AuditReport {
        self.report
    }
}

/// The generating set for [`Auditor::generators`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generators {
    /// The representables for presheaf scopes, the ring for module scopes,
    /// and all objects for abstract scopes.
    Default,
    Objects(Vec<ObjId>),
    Modules(Vec<FinModule>),
}

enum Prepared {
    Category { cat: Arc<FinCategory>, presheaves: Option<BoundedPresheafCategory> },
    Modules(fin_mod::ModuleSlice),
}

/// A scope with its slice enumerated once.
pub struct Auditor {
    scope: AuditScope,
    prepared: Prepared,
}

impl Auditor {
    pub fn new(scope: AuditScope) -> Result<Self> {
        Self::with_cancel(scope, &AtomicBool::new(false))
    }

    pub fn with_cancel(scope: AuditScope, cancel: &AtomicBool) -> Result<Self> {
        scope.validate()?;
        let prepared = match &scope.target {
            AuditTarget::Abstract(cat) => Prepared::Category { cat: cat.clone(), presheaves: None },
            AuditTarget::Presheaf { base, value_size } => {
                let m = materialize(base, Bounds::values(*value_size), None, cancel)?;
                Prepared::Category { cat: m.category.clone(), presheaves: Some(m) }
            }
            AuditTarget::FinMod { ring, max_elements } => {
                Prepared::Modules(fin_mod::ModuleSlice::new(ring, *max_elements, &scope))
            }
        };
        Ok(Auditor { scope, prepared })
    }

    pub fn scope(&self) -> &AuditScope {
        &self.scope
    }

    /// The materialized category, for presheaf scopes.
    pub fn presheaf_category(&self) -> Option<&BoundedPresheafCategory> {
        match &self.prepared {
            Prepared::Category { presheaves, .. } => presheaves.as_ref(),
            Prepared::Modules(_) => None,
        }
    }

    /// The audited category, for abstract and presheaf scopes.
    pub fn category(&self) -> Option<&Arc<FinCategory>> {
        match &self.prepared {
            Prepared::Category { cat, .. } => Some(cat),
            Prepared::Modules(_) => None,
        }
    }

    pub fn coproducts(&self) -> AuditReport {
        let mut t = Tally::new(Axiom::Coproducts, &self.scope);
        match &self.prepared {
            Prepared::Category { cat, .. } => finite::coproducts(cat, &mut t),
            Prepared::Modules(s) => s.coproducts(&mut t),
        }
        t.finish()
    }

    pub fn epi_coequalizer(&self) -> AuditReport {
        let mut t = Tally::new(Axiom::EpiCoequalizer, &self.scope);
        match &self.prepared {
            Prepared::Category { cat, .. } => finite::epi_coequalizer(cat, &mut t),
            Prepared::Modules(s) => s.epi_coequalizer(&mut t),
        }
        t.finish()
    }

    pub fn equivalence_relations(&self) -> AuditReport {
        let mut t = Tally::new(Axiom::EquivalenceRelations, &self.scope);
        match &self.prepared {
            Prepared::Category { cat, .. } => finite::equivalence_relations(cat, &mut t),
            Prepared::Modules(s) => s.equivalence_relations(&mut t),
        }
        t.finish()
    }

    pub fn exact_forks(&self) -> AuditReport {
        let mut t = Tally::new(Axiom::ExactForks, &self.scope);
        match &self.prepared {
            Prepared::Category { cat, .. } => finite::exact_forks(cat, &mut t),
            Prepared::Modules(s) => s.exact_forks(&mut t),
        }
        t.finish()
    }

    pub fn generators(&self, gens: &Generators) -> Result<AuditReport> {
        let mut t = Tally::new(Axiom::Generators, &self.scope);
        match (&self.prepared, gens) {
            (Prepared::Category { cat, presheaves }, Generators::Objects(g)) => {
                finite::generators(cat, presheaves.as_ref(), g, &mut t)
            }
            (Prepared::Category { cat, presheaves: None }, Generators::Default) => {
                finite::generators(cat, None, &cat.objects().collect::<Vec<_>>(), &mut t)
            }
            (Prepared::Category { cat, presheaves: Some(m) }, Generators::Default) => {
                let reps = finite::representables(m)?;
                finite::generators(cat, Some(m), &reps, &mut t)
            }
            (Prepared::Modules(s), Generators::Default) => s.generators(&[s.ring().regular_module()], &mut t),
            (Prepared::Modules(s), Generators::Modules(g)) => s.generators(g, &mut t),
            _ => return Err(Error::Mismatch("generators do not belong to the audited scope".into())),
        }
        Ok(t.finish())
    }

    /// Re-checks a single finding; `true` when it is still a violation.
    pub fn replay(&self, axiom: Axiom, finding: &Finding) -> Result<bool> {
        let outcome = match (&self.prepared, &finding.witness) {
            (Prepared::Category { cat, .. }, Witness::Abstract { objects, arrows }) => {
                finite::replay(cat, axiom, objects, arrows)?
            }
            (Prepared::Modules(s), Witness::Module { modules, maps }) => s.replay(axiom, modules, maps)?,
            _ => return Err(Error::Mismatch("witness does not belong to the audited scope".into())),
        };
        Ok(matches!(outcome, Outcome::Violation(_)))
    }

    /// Runs the axioms selected in the scope, in order.
    pub fn run(&self) -> Result<Vec<AuditReport>> {
        self.scope
            .axioms
            .iter()
            .map(|a| match a {
                Axiom::Coproducts => Ok(self.coproducts()),
                Axiom::EpiCoequalizer => Ok(self.epi_coequalizer()),
                Axiom::EquivalenceRelations => Ok(self.equivalence_relations()),
                Axiom::ExactForks => Ok(self.exact_forks()),
                Axiom::Generators => self.generators(&Generators::Default),
            })
            .collect()
    }
}

pub fn audit_coproducts(scope: &AuditScope) -> Result<AuditReport> {
    Ok(Auditor::new(scope.clone())?.coproducts())
}

pub fn audit_epi_coequalizer(scope: &AuditScope) -> Result<AuditReport> {
    Ok(Auditor::new(scope.clone())?.epi_coequalizer())
}

pub fn audit_equivalence_relations(scope: &AuditScope) -> Result<AuditReport> {
    Ok(Auditor::new(scope.clone())?.equivalence_relations())
}

pub fn audit_exact_forks(scope: &AuditScope) -> Result<AuditReport> {
    Ok(Auditor::new(scope.clone())?.exact_forks())
}

pub fn audit_generators(scope: &AuditScope, gens: &Generators) -> Result<AuditReport> {
    Auditor::new(scope.clone())?.generators(gens)
}

pub fn run_audit(scope: &AuditScope) -> Result<Vec<AuditReport>> {
    Auditor::new(scope.clone())?.run()
}
