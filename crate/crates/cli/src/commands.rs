//! The subcommands of `toposkit`, each producing one [`Report`].

use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::atomic::AtomicBool;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

use toposkit::giraud::{AuditScope, AuditTarget, Auditor};
use toposkit::materialize::{materialize, Bounds};
use toposkit::modules::FinRing;
use toposkit::presheaf::{
    is_iso, mod_nat_transformations, nat_module, set_nat_transformations, yoneda_mod, yoneda_set, ModPresheaf,
    Presheaf, PresheafMorphism, SetPresheaf,
};
use toposkit::reconstruction::{build_site, embedding_tally, objects_are_sheaves, LinearSite};
use toposkit::sheaf::{factor_through_unit, is_separated, is_sheaf, sheaf_witness, sheafify, SheafWitness};
use toposkit::{Error, FinCategory, ObjId};

use crate::ast::*;
use crate::diag::Diagnostic;
use crate::export::{mod_presheaf_decl, set_presheaf_decl};
use crate::elaborate::{elaborate, Elaborated, NamedPresheaf, PresheafValue};
use crate::parser::parse;
use crate::print::print;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Validate,
    SheafCheck,
    Sheafify,
    YonedaCheck,
    AdjunctionCheck,
    Reconstruct,
    GiraudAudit,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::SheafCheck => "sheaf-check",
            Command::Sheafify => "sheafify",
            Command::YonedaCheck => "yoneda-check",
            Command::AdjunctionCheck => "adjunction-check",
            Command::Reconstruct => "reconstruct",
            Command::GiraudAudit => "giraud-audit",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

/// What `giraud-audit` audits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Scope {
    /// Finite modules over `--ring`, at most `--bound` elements.
    #[default]
    Rmod,
    /// Set presheaves on the document's category, values of size at most `--bound`.
    Presheaf,
    /// The document's category itself.
    Category,
}

#[derive(Clone, Debug, Default)]
pub struct Flags {
    pub presheaf: Option<String>,
    pub object: Option<String>,
    pub ring: Option<String>,
    pub bound: Option<usize>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub scope: Scope,
}

/// A named source file.
#[derive(Clone, Debug)]
pub struct Input {
    pub path: String,
    pub text: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip)]
    witness_text: Option<String>,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into(), witness: None, witness_text: None }
    }

    fn witness(mut self, text: String, value: Value) -> Self {
        self.witness_text = Some(text);
        self.witness = Some(value);
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<Diagnostic>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub document: Option<String>,
}

impl Report {
    fn new(command: Command, checks: Vec<Check>) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.name(),
            passed: checks.iter().all(|c| c.passed),
            checks,
            diagnostics: Vec::new(),
            error: None,
            document: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self, path: &str) -> String {
        let mut out = String::new();
        for d in &self.diagnostics {
            let _ = writeln!(out, "{path}:{d}");
        }
        if let Some(e) = &self.error {
            let _ = writeln!(out, "error: {e}");
        }
        for c in &self.checks {
            let _ = writeln!(out, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            if let Some(w) = &c.witness_text {
                let _ = writeln!(out, "  witness: {w}");
            }
        }
        if self.error.is_none() && self.diagnostics.is_empty() {
            let _ = writeln!(out, "{}", if self.passed { "all checks passed" } else { "some checks failed" });
        }
        out
    }
}

/// Output of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// An input or usage error; exit code 2.
#[derive(Debug)]
struct Usage(String);

impl From<Error> for Usage {
    fn from(e: Error) -> Self {
        match e {
            Error::TooLarge(m) => Usage(format!("bound exceeded: {m}")),
            e => Usage(e.to_string()),
        }
    }
}

type CResult<T> = Result<T, Usage>;

fn usage<T>(msg: impl Into<String>) -> CResult<T> {
    Err(Usage(msg.into()))
}

pub fn run_command(command: Command, input: Option<&Input>, flags: &Flags) -> Outcome {
    let path = input.map_or("<none>", |i| i.path.as_str());
    let fail = |mut report: Report, code: i32| {
        report.passed = false;
        let (stdout, stderr) = match flags.format {
            Format::Json => (report.to_json(), String::new()),
            Format::Text => (String::new(), report.to_text(path)),
        };
        Outcome { exit_code: code, stdout, stderr }
    };
    let blank = Report::new(command, Vec::new());
    let parsed = match input {
        Some(i) => match parse(&i.text) {
            Ok(doc) => Some(doc),
            Err(diags) => return fail(Report { diagnostics: diags, ..blank }, 2),
        },
        None => None,
    };
    let env = match &parsed {
        Some(doc) => match elaborate(doc) {
            Ok(env) => Some(env),
            Err(diags) => {
                let code = if command == Command::Validate { 1 } else { 2 };
                let mut report = Report { diagnostics: diags, ..blank };
                if command == Command::Validate {
                    let first = report.diagnostics[0].to_string();
                    report.checks.push(Check::new("elaborate", false, first));
                }
                return fail(report, code);
            }
        },
        None => None,
    };
    let ctx = Ctx { doc: parsed.as_ref(), env: env.as_ref(), flags };
    let result = match command {
        Command::GiraudAudit => giraud_audit(&ctx),
        _ if ctx.env.is_none() => usage(format!("{} needs an input file", command.name())),
        Command::Validate => validate(&ctx),
        Command::SheafCheck => sheaf_check(&ctx),
        Command::Sheafify => sheafify_cmd(&ctx),
        Command::YonedaCheck => yoneda_check(&ctx),
        Command::AdjunctionCheck => adjunction_check(&ctx),
        Command::Reconstruct => reconstruct(&ctx),
    };
    match result {
        Err(Usage(msg)) => fail(Report { error: Some(msg), ..blank }, 2),
        Ok(checks) => {
            let (checks, document) = checks;
            let mut report = Report::new(command, checks);
            let mut stdout = String::new();
            match (&document, &flags.out) {
                (Some(text), Some(out)) => {
                    if let Err(e) = std::fs::write(out, text) {
                        return fail(Report { error: Some(format!("{}: {e}", out.display())), ..blank }, 2);
                    }
                }
                (Some(text), None) if flags.format == Format::Text => stdout.push_str(text),
                (Some(text), None) => report.document = Some(text.clone()),
                _ => {}
            }
            let exit_code = if report.passed { 0 } else { 1 };
            match flags.format {
                Format::Json => stdout.push_str(&report.to_json()),
                Format::Text if document.is_some() && flags.out.is_none() => {
                    // the document owns stdout
                    return Outcome { exit_code, stdout, stderr: report.to_text(path) };
                }
                Format::Text => stdout.push_str(&report.to_text(path)),
            }
            Outcome { exit_code, stdout, stderr: String::new() }
        }
    }
}

struct Ctx<'a> {
    doc: Option<&'a Document>,
    env: Option<&'a Elaborated>,
    flags: &'a Flags,
}

type Checks = (Vec<Check>, Option<String>);

impl<'a> Ctx<'a> {
    fn env(&self) -> &'a Elaborated {
        self.env.expect("document present")
    }

    /// `--presheaf`, or every presheaf in the document.
    fn presheaves(&self) -> CResult<Vec<&'a NamedPresheaf>> {
        let env = self.env();
        match &self.flags.presheaf {
            Some(name) => match env.presheaf(name) {
                Some(p) => Ok(vec![p]),
                None => usage(format!("unknown presheaf `{name}`")),
            },
            None if env.presheaves.is_empty() => usage("the document declares no presheaf"),
            None => Ok(env.presheaves.iter().collect()),
        }
    }

    /// `--object`, or every object of `cat`.
    fn objects(&self, cat: &FinCategory) -> CResult<Vec<ObjId>> {
        match &self.flags.object {
            Some(name) => match cat.object_by_name(name) {
                Some(c) => Ok(vec![c]),
                None => usage(format!("unknown object `{name}`")),
            },
            None => Ok(cat.objects().collect()),
        }
    }

    fn category_index(&self) -> CResult<usize> {
        let env = self.env();
        if let Some(name) = &self.flags.presheaf {
            return match env.presheaf(name) {
                Some(p) => Ok(p.category),
                None => usage(format!("unknown presheaf `{name}`")),
            };
        }
        match env.categories.len() {
            0 => usage("the document declares no category"),
            n => Ok(n - 1),
        }
    }

    fn topology(&self, ci: usize) -> CResult<&'a toposkit::site::GrothendieckTopology> {
        let env = self.env();
        match env.topology_on(ci) {
            Some(t) => Ok(&t.topology),
            None => usage(format!("no topology declared on {}", env.categories[ci].name)),
        }
    }
}

fn plural(n: usize, one: &str, many: &str) -> String {
    format!("{n} {}", if n == 1 { one } else { many })
}

fn validate(ctx: &Ctx) -> CResult<Checks> {
    let env = ctx.env();
    let detail = [
        plural(env.categories.len(), "category", "categories"),
        plural(env.topologies.len(), "topology", "topologies"),
        plural(env.presheaves.len(), "presheaf", "presheaves"),
        plural(env.morphisms.len(), "morphism", "morphisms"),
    ]
    .join(", ");
    Ok((vec![Check::new("elaborate", true, detail)], None))
}

fn witness_check<P: Presheaf>(p: &P, w: &SheafWitness, check: Check) -> Check {
    let cat = p.base();
    let sieve: Vec<&str> = w.sieve.arrows.iter().map(|&f| cat.arrow_name(f)).collect();
    let family = w.family_labels(p);
    let object = cat.object_name(w.object);
    let text = format!("({object}, {{{}}}, fam={})", sieve.join(", "), family.join(","));
    let value = json!({
        "object": object,
        "sieve": sieve,
        "family": family,
        "amalgamations": w.amalgamations.len(),
    });
    check.witness(text, value)
}

fn sheaf_report<P: Presheaf>(name: &str, p: &P, j: &toposkit::site::GrothendieckTopology) -> Check {
    let separated = if is_separated(p, j) { "separated" } else { "not separated" };
    match sheaf_witness(p, j) {
        None => Check::new(format!("sheaf {name}"), true, "a sheaf"),
        Some(w) => witness_check(p, &w, Check::new(format!("sheaf {name}"), false, format!("not a sheaf ({separated})"))),
    }
}

fn sheaf_check(ctx: &Ctx) -> CResult<Checks> {
    let mut checks = Vec::new();
    for p in ctx.presheaves()? {
        let j = ctx.topology(p.category)?;
        checks.push(match &p.value {
            PresheafValue::Set(f) => sheaf_report(&p.name, f, j),
            PresheafValue::Mod(f) => sheaf_report(&p.name, f, j),
        });
    }
    Ok((checks, None))
}

fn sheafify_cmd(ctx: &Ctx) -> CResult<Checks> {
    let ps = ctx.presheaves()?;
    let [p] = ps.as_slice() else {
        return usage("sheafify needs --presheaf when the document declares several presheaves");
    };
    let env = ctx.env();
    let doc = ctx.doc.expect("document present");
    let j = ctx.topology(p.category)?;
    let cat_decl = doc.categories().nth(p.category).expect("elaborated").clone();
    let ti = env.topologies.iter().rposition(|t| t.category == p.category).expect("topology found");
    let top_decl = doc.topologies().nth(ti).expect("elaborated").clone();
    let mut decls = vec![Decl::Category(cat_decl.clone()), Decl::Topology(top_decl)];
    let cat_name = Ident::new(cat_decl.name.name.clone());
    let (decl, checks) = match &p.value {
        PresheafValue::Set(f) => {
            let a = sheafify(f, j)?;
            let decl = set_presheaf_decl(&p.name, &cat_name, &a.sheaf);
            (decl, sheafify_checks(&p.name, f, &a.first.presheaf, &a.sheaf, j))
        }
        PresheafValue::Mod(f) => {
            let a = sheafify(f, j)?;
            decls.push(Decl::Ring(RingDecl { components: f.ring().components().to_vec(), span: Span::default() }));
            let decl = mod_presheaf_decl(&p.name, &cat_name, &a.sheaf);
            (decl, sheafify_checks(&p.name, f, &a.first.presheaf, &a.sheaf, j))
        }
    };
    decls.push(Decl::Presheaf(decl));
    Ok((checks, Some(print(&Document { decls }))))
}

fn sizes<P: Presheaf>(p: &P) -> String {
    let cat = p.base();
    let parts: Vec<String> = cat.objects().map(|c| format!("{}: {}", cat.object_name(c), p.card(c))).collect();
    parts.join(", ")
}

fn sheafify_checks<P: Presheaf>(
    name: &str,
    f: &P,
    plus: &P,
    sheaf: &P,
    j: &toposkit::site::GrothendieckTopology,
) -> Vec<Check> {
    vec![
        Check::new(format!("{name}+ separated"), is_separated(plus, j), format!("sizes {}", sizes(plus))),
        Check::new(format!("a{name} sheaf"), is_sheaf(sheaf, j), format!("sizes {}", sizes(sheaf))),
        Check::new(
            format!("{name} before sheafification"),
            true,
            if is_sheaf(f, j) { "a sheaf" } else { "not a sheaf" },
        ),
    ]
}

fn yoneda_check(ctx: &Ctx) -> CResult<Checks> {
    let env = ctx.env();
    let mut checks = Vec::new();
    for p in ctx.presheaves()? {
        let cat = &env.categories[p.category].category;
        for c in ctx.objects(cat)? {
            let label = format!("yoneda {} at {}", p.name, cat.object_name(c));
            checks.push(match &p.value {
                PresheafValue::Set(f) => set_yoneda(cat, &p.name, f, c, label)?,
                PresheafValue::Mod(f) => {
                    let y = yoneda_mod(cat, f.ring(), c)?;
                    let nats = mod_nat_transformations(&y, f).len();
                    let module = nat_module(&y, f)?.module.card();
                    let passed = nats == f.card(c) && module == f.card(c);
                    let detail = format!("|Nat(y {0}, {1})| = {nats}, |{1}({0})| = {2}", cat.object_name(c), p.name, f.card(c));
                    Check::new(label, passed, detail)
                }
            });
        }
    }
    Ok((checks, None))
}

/// Evaluation at the identity is a bijection `Nat(y C, F) -> F(C)` whose
/// inverse sends `x` to `u |-> F(u)(x)`.
fn set_yoneda(cat: &std::sync::Arc<FinCategory>, name: &str, f: &SetPresheaf, c: ObjId, label: String) -> CResult<Check> {
    let y = yoneda_set(cat, c)?;
    let nats = set_nat_transformations(&y, f);
    let id = cat.hom(c, c).iter().position(|&g| g == cat.identity(c)).expect("identity in hom-set");
    let mut values: Vec<usize> = nats.iter().map(|m| m.apply(c, id)).collect();
    let natural = nats.iter().all(|m| {
        let x = m.apply(c, id);
        cat.objects().all(|d| cat.hom(d, c).iter().enumerate().all(|(k, &u)| m.apply(d, k) == f.restrict(u, x)))
    });
    values.sort_unstable();
    values.dedup();
    let bijective = values.len() == nats.len() && nats.len() == f.card(c);
    let detail = format!(
        "|Nat(y {0}, {name})| = {1}, |{name}({0})| = {2}{3}",
        cat.object_name(c),
        nats.len(),
        f.card(c),
        if natural { "" } else { ", inverse not natural" }
    );
    Ok(Check::new(label, bijective && natural, detail))
}

fn adjunction_check(ctx: &Ctx) -> CResult<Checks> {
    let env = ctx.env();
    let mut checks = Vec::new();
    for p in ctx.presheaves()? {
        let j = ctx.topology(p.category)?;
        match &p.value {
            PresheafValue::Set(f) => {
                let a = sheafify(f, j)?;
                let mut targets: Vec<(String, SetPresheaf)> = env
                    .presheaves
                    .iter()
                    .filter(|q| q.category == p.category)
                    .filter_map(|q| match &q.value {
                        PresheafValue::Set(g) if is_sheaf(g, j) => Some((q.name.clone(), g.clone())),
                        _ => None,
                    })
                    .collect();
                targets.push((format!("a{}", p.name), a.sheaf.clone()));
                for (gname, g) in &targets {
                    let direct = set_nat_transformations(f, g);
                    let through = set_nat_transformations(&a.sheaf, g);
                    let mut unique = true;
                    for phi in &direct {
                        unique &= factor_through_unit(phi, f, g, j).is_ok_and(|psi| a.unit.then(&psi) == *phi);
                    }
                    let detail = format!(
                        "|Nat(a{0}, {gname})| = {1}, |Nat({0}, {gname})| = {2}{3}",
                        p.name,
                        through.len(),
                        direct.len(),
                        if unique { "" } else { ", factorization through the unit not unique" }
                    );
                    checks.push(Check::new(
                        format!("a -| i at ({}, {gname})", p.name),
                        unique && through.len() == direct.len(),
                        detail,
                    ));
                }
                if is_sheaf(f, j) {
                    checks.push(Check::new(format!("a i {} = {}", p.name, p.name), is_iso(&a.unit, f, &a.sheaf), "unit is an isomorphism"));
                }
            }
            PresheafValue::Mod(f) => {
                let site = LinearSite::new(f.ring().clone(), j.clone());
                let cat = &env.categories[p.category].category;
                let lf = site.left_adjoint(f)?;
                let mut targets: Vec<(String, ModPresheaf)> = env
                    .presheaves
                    .iter()
                    .filter(|q| q.category == p.category)
                    .filter_map(|q| match &q.value {
                        PresheafValue::Mod(e) if e.ring() == f.ring() && is_sheaf(e, j) => {
                            Some((q.name.clone(), e.clone()))
                        }
                        _ => None,
                    })
                    .collect();
                targets.push((format!("L{}", p.name), lf.value().clone()));
                for (ename, e) in &targets {
                    let r = site.adjunction_check(f, e)?;
                    let detail = format!(
                        "|Nat({0}, R {ename})| = {1}, |Hom(L {0}, {ename})| = {2}{3}{4}",
                        p.name,
                        r.left,
                        r.right,
                        if r.bijective { "" } else { ", not bijective" },
                        if r.triangles { "" } else { ", triangle identities fail" }
                    );
                    checks.push(Check::new(format!("L -| R at ({}, {ename})", p.name), r.holds(), detail));
                }
                for c in ctx.objects(cat)? {
                    let ok = site.tensor_unit_check(c)?;
                    checks.push(Check::new(
                        format!("L y {} = A {}", cat.object_name(c), cat.object_name(c)),
                        ok,
                        "tensor unit",
                    ));
                }
            }
        }
    }
    Ok((checks, None))
}

fn reconstruct(ctx: &Ctx) -> CResult<Checks> {
    let env = ctx.env();
    let ci = ctx.category_index()?;
    let base = &env.categories[ci].category;
    let bound = ctx.flags.bound.unwrap_or(2);
    let m = materialize(base, Bounds::values(bound), None, &AtomicBool::new(false))?;
    let mut gens = Vec::new();
    for c in base.objects() {
        let y = yoneda_set(base, c)?;
        match m.locate(&y) {
            Some((g, _)) => gens.push(g),
            None => {
                return usage(format!(
                    "bound exceeded: the representable at {} does not fit in bound {bound}",
                    base.object_name(c)
                ))
            }
        }
    }
    let site = build_site(&m.category, &gens)?;
    let mut checks = vec![Check::new(
        "ambient",
        true,
        format!(
            "{} presheaves with values of size <= {bound}, {} maps",
            m.objects.len(),
            m.morphisms.len()
        ),
    )];
    checks.push(Check::new(
        "basis",
        site.basis_report.is_valid(),
        format!("epimorphic families on {} generators", gens.len()),
    ));
    let reports = objects_are_sheaves(&site)?;
    let bad: Vec<&str> = reports.iter().filter(|r| r.witness.is_some()).map(|r| r.name.as_str()).collect();
    checks.push(Check::new(
        "objects are sheaves",
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} of {}", reports.len(), reports.len())
        } else {
            format!("not sheaves: {}", bad.join(", "))
        },
    ));
    let t = embedding_tally(&site)?;
    checks.push(Check::new(
        "embedding",
        t.full && t.faithful,
        format!(
            "{} pairs, {}, {}",
            t.pairs,
            if t.full { "full" } else { "not full" },
            if t.faithful { "faithful" } else { "not faithful" }
        ),
    ));
    Ok((checks, None))
}

fn giraud_audit(ctx: &Ctx) -> CResult<Checks> {
    let target = match ctx.flags.scope {
        Scope::Rmod => {
            let ring = match (&ctx.flags.ring, ctx.env.and_then(|e| e.ring.clone())) {
                (Some(text), _) => FinRing::parse(text)?,
                (None, Some(ring)) => ring,
                (None, None) => return usage("giraud-audit --scope rmod needs --ring or a ring declaration"),
            };
            AuditTarget::FinMod { ring, max_elements: ctx.flags.bound.unwrap_or(16) }
        }
        Scope::Presheaf | Scope::Category => {
            if ctx.env.is_none() {
                return usage("this scope needs an input file");
            }
            let base = ctx.env().categories[ctx.category_index()?].category.clone();
            match ctx.flags.scope {
                Scope::Presheaf => AuditTarget::Presheaf { base, value_size: ctx.flags.bound.unwrap_or(2) },
                _ => AuditTarget::Abstract(base),
            }
        }
    };
    let reports = Auditor::new(AuditScope::new(target))?.run()?;
    let checks = reports
        .iter()
        .map(|r| {
            let detail = format!(
                "{}: {} checked, {} violations{}",
                r.scope,
                r.checked,
                r.violations.len(),
                if r.exhaustive { "" } else { ", sampled" }
            );
            let check = Check::new(r.axiom.to_string(), r.passed(), detail);
            match r.violations.first() {
                Some(v) => check.witness(v.detail.clone(), json!({ "detail": v.detail })),
                None => check,
            }
        })
        .collect();
    Ok((checks, None))
}
