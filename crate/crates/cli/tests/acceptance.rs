//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero only on
//! an unexpected failure; a known failure still prints FAIL and has its
//! counterexample asserted.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::atomic::AtomicBool;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use toposkit::category::fixtures::{c2, chain3, parallel_pair};
use toposkit::giraud::{AuditScope, AuditTarget, Auditor, Axiom, Witness};
use toposkit::materialize::{materialize, Bounds, BoundedPresheafCategory};
use toposkit::modules::{hom_preserves_limit, hom_turns_colimit_into_limit, FinRing};
use toposkit::presheaf::{
    colimit_of_representables_mod, colimit_of_representables_set, is_iso, isomorphic, mod_nat_transformations,
    nat_module, set_nat_transformations, yoneda_mod, yoneda_set, ModPresheaf, Presheaf, PresheafMorphism,
    SetPresheaf,
};
use toposkit::random;
use toposkit::reconstruction::{build_site, embedding_tally, objects_are_sheaves, LinearSite};
use toposkit::sheaf::{
    factor_through_unit, is_separated, is_sheaf, is_sheaf_on_basis, plus_construction, sheaf_epi_check, sheafify,
    SheafFlavor,
};
use toposkit::site::{epimorphic_basis, generate_topology, validate_basis, GrothendieckTopology};
use toposkit::{FinCategory, ObjId};
use toposkit_cli::elaborate::{Elaborated, MorphismValue, PresheafValue};
use toposkit_cli::{elaborate, parse};

enum Verdict {
    Pass(String),
    /// Fails for a documented mathematical reason; the counterexample was
    /// checked.
    Known(String),
    Fail(String),
}

use Verdict::*;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: u64) -> Result<String, String> {
    let t = start.elapsed();
    ensure(t < Duration::from_secs(limit), || format!("took {:.1} s, limit {limit} s", t.as_secs_f64()))?;
    Ok(format!("{:.1} s", t.as_secs_f64()))
}

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn documents() -> Vec<(String, Elaborated)> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(fixture_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "site"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let text = std::fs::read_to_string(&p).unwrap();
            let env = elaborate(&parse(&text).unwrap()).unwrap();
            (p.file_name().unwrap().to_string_lossy().into_owned(), env)
        })
        .collect()
}

/// A fixture presheaf with the topology declared on its category.
struct Fixture<P> {
    name: String,
    p: P,
    j: Option<GrothendieckTopology>,
}

fn set_fixtures(docs: &[(String, Elaborated)]) -> Vec<Fixture<SetPresheaf>> {
    let mut out = Vec::new();
    for (file, env) in docs {
        for np in &env.presheaves {
            if let PresheafValue::Set(p) = &np.value {
                let j = env.topology_on(np.category).map(|t| t.topology.clone());
                out.push(Fixture { name: format!("{file}:{}", np.name), p: p.clone(), j });
            }
        }
    }
    out
}

fn mod_fixtures(docs: &[(String, Elaborated)]) -> Vec<Fixture<ModPresheaf>> {
    let mut out = Vec::new();
    for (file, env) in docs {
        for np in &env.presheaves {
            if let PresheafValue::Mod(p) = &np.value {
                let j = env.topology_on(np.category).map(|t| t.topology.clone());
                out.push(Fixture { name: format!("{file}:{}", np.name), p: p.clone(), j });
            }
        }
    }
    out
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn psh(base: FinCategory) -> BoundedPresheafCategory {
    materialize(&Arc::new(base), Bounds::values(2), None, &AtomicBool::new(false)).unwrap()
}

fn representables(m: &BoundedPresheafCategory) -> Vec<ObjId> {
    m.base.objects().map(|c| m.locate(&yoneda_set(&m.base, c).unwrap()).unwrap().0).collect()
}

fn sheaf_condition_oracles() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let (mut applicable, mut sheaves) = (0, 0);
    for _ in 0..400 {
        let cat = Arc::new(random::category(&mut r));
        ensure(cat.num_objects() <= 3 && cat.num_arrows() <= 8, || format!("site too large: {cat:?}"))?;
        let b = random::basis(&mut r, &cat);
        let p = random::set_presheaf(&mut r, &cat, 4);
        if !validate_basis(&b).unwrap().is_valid() {
            continue;
        }
        let j = generate_topology(&b).unwrap();
        if let Some(by_basis) = is_sheaf_on_basis(&p, &b) {
            applicable += 1;
            sheaves += usize::from(by_basis);
            ensure(by_basis == is_sheaf(&p, &j), || format!("checkers disagree on {p:?}"))?;
        }
    }
    ensure(applicable >= 100, || format!("only {applicable} applicable sites"))?;
    ensure(sheaves > 0 && sheaves < applicable, || "no mix of sheaves and non-sheaves".into())?;
    Ok(format!("{applicable} sites agree ({sheaves} sheaves), {}", within(start, 60)?))
}

/// Fixture ambients with their generators; the flag marks value-bounded
/// presheaf categories, whose missing colimits are truncation artifacts.
fn ambients() -> Vec<(&'static str, Arc<FinCategory>, Vec<ObjId>, bool)> {
    let mut out = Vec::new();
    for (name, cat) in [("C2", c2()), ("chain3", chain3()), ("parallel", parallel_pair())] {
        let cat = Arc::new(cat);
        let gens = cat.objects().collect();
        out.push((name, cat, gens, false));
    }
    for (name, base) in [("Psh(C2)", c2()), ("Psh(chain3)", chain3())] {
        let m = psh(base);
        let gens = representables(&m);
        out.push((name, m.category.clone(), gens, true));
    }
    out
}

fn basis_lemma() -> Outcome {
    let start = Instant::now();
    let (mut names, mut skipped) = (Vec::new(), Vec::new());
    for (name, amb, gens, truncated) in ambients() {
        if !truncated {
            let audit = Auditor::new(AuditScope::new(AuditTarget::Abstract(amb.clone()))).unwrap();
            let reports = audit.run().unwrap();
            if let Some(h) = reports.iter().flat_map(|r| &r.hypothesis_failures).next() {
                skipped.push(format!("{name} ({})", h.detail));
                continue;
            }
        }
        let site = epimorphic_basis(&amb, &gens, None).map_err(|e| format!("{name}: {e}"))?;
        let report = validate_basis(&site.basis).unwrap();
        ensure(report.is_valid(), || format!("{name}: {report}"))?;
        names.push(name);
    }
    ensure(names.len() == 4, || format!("only {names:?} meet the preconditions"))?;
    Ok(format!("valid on {}; skipped {}; {}", names.join(", "), skipped.join(", "), within(start, 10)?))
}

fn objects_are_sheaves_criterion() -> Outcome {
    let mut total = 0;
    for base in [c2(), chain3()] {
        let m = psh(base);
        let ctx = build_site(&m.category, &representables(&m)).unwrap();
        for r in objects_are_sheaves(&ctx).unwrap() {
            ensure(r.witness.is_none(), || format!("{} is not a sheaf", r.name))?;
            total += 1;
        }
        let t = embedding_tally(&ctx).unwrap();
        ensure(t.full && t.faithful, || format!("embedding fails at {:?}", t.failures))?;
    }
    Ok(format!("{total} objects are sheaves, embeddings full and faithful"))
}

fn set_yoneda_holds(f: &SetPresheaf) -> Result<(), String> {
    let cat = f.base();
    for c in cat.objects() {
        let y = yoneda_set(cat, c).unwrap();
        let id = cat.hom(c, c).iter().position(|&g| g == cat.identity(c)).unwrap();
        let nats = set_nat_transformations(&y, f);
        ensure(nats.len() == f.card(c), || format!("|Nat(y{c:?}, F)| = {} but |F| = {}", nats.len(), f.card(c)))?;
        let mut at_id: Vec<usize> = nats.iter().map(|g| g.apply(c, id)).collect();
        at_id.sort();
        at_id.dedup();
        ensure(at_id.len() == nats.len(), || "evaluation at the identity is not injective".into())?;
        for g in &nats {
            for x in cat.objects() {
                for (k, &u) in cat.hom(x, c).iter().enumerate() {
                    ensure(g.apply(x, k) == f.restrict(u, g.apply(c, id)), || "component is not F(u)(x)".into())?;
                }
            }
        }
    }
    Ok(())
}

fn mod_yoneda_holds(f: &ModPresheaf) -> Result<(), String> {
    let cat = f.base();
    for c in cat.objects() {
        let y = yoneda_mod(cat, f.ring(), c).unwrap();
        let n = f.card(c);
        ensure(mod_nat_transformations(&y, f).len() == n, || format!("Nat count differs from |F({c:?})|"))?;
        ensure(nat_module(&y, f).unwrap().module.card() == n, || "Nat module has the wrong order".into())?;
    }
    Ok(())
}

fn yoneda(docs: &[(String, Elaborated)]) -> Outcome {
    let start = Instant::now();
    let (sets, mods) = (set_fixtures(docs), mod_fixtures(docs));
    for f in &sets {
        set_yoneda_holds(&f.p).map_err(|e| format!("{}: {e}", f.name))?;
    }
    for f in &mods {
        mod_yoneda_holds(&f.p).map_err(|e| format!("{}: {e}", f.name))?;
    }
    let mut r = rng(4);
    for k in 0..100 {
        let cat = Arc::new(random::category(&mut r));
        let f = random::set_presheaf(&mut r, &cat, 4);
        set_yoneda_holds(&f).map_err(|e| format!("random set presheaf {k}: {e}"))?;
        let ring = FinRing::cyclic(r.gen_range(2..=3)).unwrap();
        let m = random::mod_presheaf(&mut r, &cat, &ring, 4);
        mod_yoneda_holds(&m).map_err(|e| format!("random module presheaf {k}: {e}"))?;
    }
    Ok(format!("{} fixtures and 200 random presheaves, {}", sets.len() + mods.len(), within(start, 60)?))
}

fn colimits(docs: &[(String, Elaborated)]) -> Outcome {
    let (sets, mods) = (set_fixtures(docs), mod_fixtures(docs));
    for f in &sets {
        let c = colimit_of_representables_set(&f.p).unwrap();
        ensure(c.is_iso && isomorphic(&c.colimit, &f.p), || format!("{}: colimit differs", f.name))?;
    }
    for f in &mods {
        let c = colimit_of_representables_mod(&f.p).unwrap();
        ensure(c.is_iso && isomorphic(&c.colimit, &f.p), || format!("{}: colimit differs", f.name))?;
    }
    Ok(format!("{} fixtures", sets.len() + mods.len()))
}

fn sheafification_holds<P: SheafFlavor>(f: &P, j: &GrothendieckTopology, sheaves: &[P]) -> Result<(), String>
where
    P::Morphism: PartialEq,
{
    let plus = plus_construction(f, j).unwrap();
    ensure(is_separated(&plus.presheaf, j), || "F+ is not separated".into())?;
    if is_separated(f, j) {
        ensure(is_sheaf(&plus.presheaf, j), || "F is separated but F+ is not a sheaf".into())?;
    }
    let a = sheafify(f, j).unwrap();
    ensure(is_sheaf(&a.sheaf, j), || "aF is not a sheaf".into())?;
    ensure(is_iso(&a.unit, f, &a.sheaf) == is_sheaf(f, j), || "unit iso does not match the sheaf condition".into())?;
    let again = sheafify(&a.sheaf, j).unwrap();
    ensure(is_iso(&again.unit, &a.sheaf, &again.sheaf), || "a i is not the identity on aF".into())?;
    for g in sheaves.iter().chain([&a.sheaf]) {
        let direct = f.nat_transformations(g);
        ensure(a.sheaf.nat_transformations(g).len() == direct.len(), || "Nat(aF, G) != Nat(F, G)".into())?;
        for phi in &direct {
            let psi = factor_through_unit(phi, f, g, j).map_err(|e| e.to_string())?;
            ensure(a.unit.then(&psi) == *phi, || "factorization does not commute".into())?;
        }
    }
    Ok(())
}

fn sheafification(docs: &[(String, Elaborated)]) -> Outcome {
    let mut n = 0;
    let sets: Vec<_> = set_fixtures(docs).into_iter().filter(|f| f.j.is_some()).collect();
    for f in &sets {
        let j = f.j.as_ref().unwrap();
        let sheaves: Vec<SetPresheaf> = sets
            .iter()
            .filter(|g| Arc::ptr_eq(g.p.base(), f.p.base()) && is_sheaf(&g.p, j))
            .map(|g| g.p.clone())
            .collect();
        sheafification_holds(&f.p, j, &sheaves).map_err(|e| format!("{}: {e}", f.name))?;
        n += 1;
    }
    let mods: Vec<_> = mod_fixtures(docs).into_iter().filter(|f| f.j.is_some()).collect();
    for f in &mods {
        let j = f.j.as_ref().unwrap();
        let sheaves: Vec<ModPresheaf> = mods
            .iter()
            .filter(|g| Arc::ptr_eq(g.p.base(), f.p.base()) && g.p.ring() == f.p.ring() && is_sheaf(&g.p, j))
            .map(|g| g.p.clone())
            .collect();
        sheafification_holds(&f.p, j, &sheaves).map_err(|e| format!("{}: {e}", f.name))?;
        n += 1;
    }
    let c2 = docs.iter().find(|(file, _)| file == "c2.site").map(|(_, env)| env).unwrap();
    let PresheafValue::Set(f) = &c2.presheaf("F").unwrap().value else { unreachable!() };
    let j = &c2.topologies[0].topology;
    let v = c2.categories[0].category.object_by_name("V").unwrap();
    let plus = plus_construction(f, j).unwrap();
    let labels: Vec<String> = (0..plus.presheaf.card(v)).map(|x| plus.presheaf.label(v, x)).collect();
    ensure(labels == ["a", "b"], || format!("C2: F+(V) = {labels:?}"))?;
    Ok(format!("{n} fixture presheaves, C2: F+(V) = {{a, b}}"))
}

fn adjunction() -> Outcome {
    let start = Instant::now();
    let mut r = rng(7);
    let (mut pairs, mut natural, mut units) = (0, 0, 0);
    while pairs < 50 {
        let cat = Arc::new(random::category(&mut r));
        let j = random::topology(&mut r, &cat);
        let ring = FinRing::cyclic(r.gen_range(2..=3)).unwrap();
        let f = random::mod_presheaf(&mut r, &cat, &ring, 4);
        let f1 = random::mod_presheaf(&mut r, &cat, &ring, 4);
        let e = sheafify(&random::mod_presheaf(&mut r, &cat, &ring, 4), &j).unwrap().sheaf;
        let e2 = sheafify(&random::mod_presheaf(&mut r, &cat, &ring, 4), &j).unwrap().sheaf;
        let site = LinearSite::new(ring, j);
        let report = site.adjunction_check(&f, &e).unwrap();
        ensure(report.holds(), || format!("pair {pairs}: {report:?}"))?;
        ensure(site.counit_check(&e).unwrap(), || format!("pair {pairs}: counit is not an isomorphism"))?;
        if pairs % 5 == 0 {
            for a in f1.nat_transformations(&f).into_iter().take(2) {
                ensure(site.naturality_in_f(&a, &f1, &f, &e).unwrap(), || format!("pair {pairs}: not natural in F"))?;
                natural += 1;
            }
            for b in e.nat_transformations(&e2).into_iter().take(2) {
                ensure(site.naturality_in_e(&f, &b, &e, &e2).unwrap(), || format!("pair {pairs}: not natural in E"))?;
                natural += 1;
            }
        }
        for c in cat.objects() {
            ensure(site.tensor_unit_check(c).unwrap(), || format!("pair {pairs}: L(y C) is not A(C)"))?;
            units += 1;
        }
        pairs += 1;
    }
    Ok(format!(
        "{pairs} pairs, {natural} naturality squares, {units} representables, {}",
        within(start, 120)?
    ))
}

fn giraud() -> Result<Verdict, String> {
    let start = Instant::now();
    let mut stable = 0;
    for n in [2, 4, 6] {
        let ring = FinRing::cyclic(n).unwrap();
        let a = Auditor::new(AuditScope::new(AuditTarget::FinMod { ring, max_elements: 16 })).unwrap();
        for report in [a.epi_coequalizer(), a.equivalence_relations(), a.exact_forks()] {
            ensure(report.passed() && report.checked > 0, || format!("Z/{n}: {report}"))?;
        }
        let co = a.coproducts();
        ensure(!co.violations.is_empty(), || format!("Z/{n}: coproducts unexpectedly pass"))?;
        for v in &co.violations {
            // one map means the stability half failed; disjointness never does
            let Witness::Module { maps, .. } = &v.witness else { unreachable!() };
            ensure(maps.len() == 1, || format!("Z/{n}: disjointness fails: {}", v.detail))?;
        }
        for v in co.violations.iter().take(3) {
            ensure(a.replay(Axiom::Coproducts, v).unwrap(), || format!("Z/{n}: witness does not replay"))?;
        }
        stable += co.violations.len();
    }
    let time = within(start, 120)?;
    Ok(Known(format!(
        "(ii)-(iv) pass over Z/2, Z/4, Z/6; (i) fails: coproducts are disjoint but not pullback-stable \
         ({stable} replayable witnesses, e.g. 0 + 0 pulled back along Z/2 -> 0), {time}"
    )))
}

fn local_surjectivity_holds<P: SheafFlavor>(phi: &P::Morphism, src: &P, tgt: &P, j: &GrothendieckTopology) -> Result<bool, String> {
    let r = sheaf_epi_check(phi, src, tgt, j).map_err(|e| e.to_string())?;
    ensure(!r.locally_surjective || r.epi, || "locally surjective but not epi".into())?;
    Ok(r.locally_surjective)
}

fn local_surjectivity(docs: &[(String, Elaborated)]) -> Outcome {
    let (mut maps, mut surjective) = (0, 0);
    for (file, env) in docs {
        for m in &env.morphisms {
            let (src, tgt) = (&env.presheaves[m.source], &env.presheaves[m.target]);
            let Some(t) = env.topology_on(src.category) else { continue };
            let j = &t.topology;
            let ls = match (&m.value, &src.value, &tgt.value) {
                (MorphismValue::Set(phi), PresheafValue::Set(p), PresheafValue::Set(q)) if is_sheaf(p, j) && is_sheaf(q, j) => {
                    local_surjectivity_holds(phi, p, q, j)
                }
                (MorphismValue::Mod(phi), PresheafValue::Mod(p), PresheafValue::Mod(q)) if is_sheaf(p, j) && is_sheaf(q, j) => {
                    local_surjectivity_holds(phi, p, q, j)
                }
                _ => continue,
            }
            .map_err(|e| format!("{file}:{}: {e}", m.name))?;
            maps += 1;
            surjective += usize::from(ls);
        }
    }
    // every map between fixture sheaves and sheafified fixtures
    let sets: Vec<(SetPresheaf, GrothendieckTopology)> = set_fixtures(docs)
        .into_iter()
        .filter_map(|f| f.j.map(|j| (sheafify(&f.p, &j).unwrap().sheaf, j)))
        .collect();
    for (p, j) in &sets {
        for (q, _) in sets.iter().filter(|(q, _)| Arc::ptr_eq(q.base(), p.base())) {
            for phi in p.nat_transformations(q) {
                surjective += usize::from(local_surjectivity_holds(&phi, p, q, j)?);
                maps += 1;
            }
        }
    }
    let mods: Vec<(ModPresheaf, GrothendieckTopology)> = mod_fixtures(docs)
        .into_iter()
        .filter_map(|f| f.j.map(|j| (sheafify(&f.p, &j).unwrap().sheaf, j)))
        .collect();
    for (p, j) in &mods {
        for (q, _) in mods.iter().filter(|(q, _)| Arc::ptr_eq(q.base(), p.base()) && q.ring() == p.ring()) {
            for phi in p.nat_transformations(q) {
                surjective += usize::from(local_surjectivity_holds(&phi, p, q, j)?);
                maps += 1;
            }
        }
    }
    ensure(surjective > 0 && surjective < maps, || "no mix of surjective and other maps".into())?;
    Ok(format!("{maps} sheaf maps, {surjective} locally surjective and all epi"))
}

fn hom_limits() -> Outcome {
    let mut nontrivial = 0;
    for seed in 0..20 {
        let mut r = rng(seed);
        let ring = random::ring(&mut r).unwrap();
        let d = random::module_diagram(&mut r, &ring, 3, 4);
        let e = random::module(&mut r, &ring, 4);
        ensure(hom_preserves_limit(&e, &d).unwrap(), || format!("diagram {seed}: Hom(E, -) breaks the limit"))?;
        ensure(hom_turns_colimit_into_limit(&d, &e).unwrap(), || format!("diagram {seed}: Hom(-, E) breaks the colimit"))?;
        nontrivial += usize::from(!d.edges.is_empty() && e.card() > 1);
    }
    ensure(nontrivial >= 5, || format!("only {nontrivial} nontrivial diagrams"))?;
    Ok(format!("20 diagrams ({nontrivial} nontrivial)"))
}

struct Run {
    code: i32,
    stdout: String,
}

fn toposkit(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_toposkit")).args(args).output().unwrap();
    Run { code: out.status.code().unwrap(), stdout: String::from_utf8(out.stdout).unwrap() }
}

fn stable_json(args: &[&str]) -> Result<serde_json::Value, String> {
    let mut args = args.to_vec();
    args.extend(["--format", "json"]);
    let (a, b) = (toposkit(&args), toposkit(&args));
    ensure(a.stdout == b.stdout && a.code == b.code, || format!("{args:?}: JSON differs between runs"))?;
    serde_json::from_str(&a.stdout).map_err(|e| format!("{args:?}: {e}"))
}

fn cli() -> Result<Verdict, String> {
    let dir = tempfile::tempdir().unwrap();
    let c2 = fixture_dir().join("c2.site").display().to_string();
    let out = dir.path().join("out.site").display().to_string();

    let r = toposkit(&["sheaf-check", &c2, "--presheaf", "F"]);
    ensure(r.code == 1, || format!("sheaf-check exited {}", r.code))?;
    ensure(r.stdout.contains("not a sheaf") && r.stdout.contains("(V, {i}, fam=b)"), || r.stdout.clone())?;
    let v = stable_json(&["sheaf-check", &c2, "--presheaf", "F"])?;
    ensure(v["checks"][0]["witness"]["family"] == serde_json::json!(["b"]), || v.to_string())?;

    let r = toposkit(&["sheafify", &c2, "--presheaf", "F", "--out", &out]);
    ensure(r.code == 0, || format!("sheafify exited {}", r.code))?;
    let r = toposkit(&["sheaf-check", &out, "--presheaf", "F"]);
    ensure(r.code == 0, || format!("sheaf-check on the output exited {}", r.code))?;
    let first = std::fs::read_to_string(&out).unwrap();
    stable_json(&["sheafify", &c2, "--presheaf", "F"])?;
    toposkit(&["sheafify", &c2, "--presheaf", "F", "--out", &out]);
    ensure(std::fs::read_to_string(&out).unwrap() == first, || "sheafify output differs between runs".into())?;

    let audit = ["giraud-audit", "--scope", "rmod", "--ring", "Z/2", "--bound", "16"];
    let r = toposkit(&audit);
    let v = stable_json(&audit)?;
    let checks = v["checks"].as_array().unwrap();
    let passed = |k: usize| checks[k]["passed"] == true;
    ensure(checks.len() == 5 && (1..5).all(passed), || format!("audit checks: {v}"))?;
    if r.code == 0 {
        return Ok(Pass("all three examples, byte-stable JSON".into()));
    }
    ensure(r.code == 1 && !passed(0), || format!("giraud-audit exited {}", r.code))?;
    Ok(Known(
        "sheaf-check exits 1 and sheafify round-trips with byte-stable JSON; giraud-audit exits 1, \
         not 0: (ii)-(v) pass and (i) fails on pullback stability of coproducts"
            .into(),
    ))
}

fn run(n: usize, name: &str, f: impl FnOnce() -> Result<Verdict, String>) -> bool {
    let verdict = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(v)) => v,
        Ok(Err(e)) => Fail(e),
        Err(p) => Fail(
            p.downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()),
        ),
    };
    let (tag, detail, ok) = match verdict {
        Pass(d) => ("PASS", d, true),
        Known(d) => ("FAIL", format!("known: {d}"), true),
        Fail(d) => ("FAIL", d, false),
    };
    println!("criterion {n:>2} {tag} {name}: {detail}");
    ok
}

fn pass(o: Outcome) -> Result<Verdict, String> {
    o.map(Pass)
}

fn main() {
    let docs = documents();
    let results = [
        run(1, "sheaf-condition oracle equivalence", || pass(sheaf_condition_oracles())),
        run(2, "basis lemma", || pass(basis_lemma())),
        run(3, "objects are sheaves", || pass(objects_are_sheaves_criterion())),
        run(4, "Yoneda (Set and Mod)", || pass(yoneda(&docs))),
        run(5, "colimit of representables", || pass(colimits(&docs))),
        run(6, "sheafification suite", || pass(sheafification(&docs))),
        run(7, "adjunction suite", || pass(adjunction())),
        run(8, "Giraud converse in R-Mod", giraud),
        run(9, "local surjectivity", || pass(local_surjectivity(&docs))),
        run(10, "Hom-functor limit preservation", || pass(hom_limits())),
        run(11, "CLI end-to-end", cli),
    ];
    if results.iter().any(|ok| !ok) {
        std::process::exit(1);
    }
}
