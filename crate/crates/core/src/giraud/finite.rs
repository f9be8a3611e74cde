use super::{Axiom, Outcome, Tally, Witness};
use crate::category::{
    coequalizer, coproduct, factor_through, factor_through_colimit, is_epi, is_iso, kernel_pair, pullback,
    separation_witness, verify_colimit, ArrowId, Cone, Diagram, FinCategory, ObjId, Pullback,
};
use crate::error::{Error, Result};
use crate::materialize::BoundedPresheafCategory;
use crate::presheaf::{colimit_of_representables_set, yoneda_set};

fn is_initial(cat: &FinCategory, x: ObjId) -> bool {
    cat.objects().all(|y| cat.hom(x, y).len() == 1)
}

fn name(cat: &FinCategory, x: ObjId) -> &str {
    cat.object_name(x)
}

fn witness(objects: &[ObjId], arrows: &[ArrowId]) -> Witness {
    Witness::Abstract { objects: objects.to_vec(), arrows: arrows.to_vec() }
}

/// Disjointness of `a + b` when `f` is `None`, otherwise stability of the
/// coproduct under pullback along `f`.
pub(super) fn coproduct_pair(cat: &FinCategory, a: ObjId, b: ObjId, f: Option<ArrowId>) -> Outcome {
    let Some(s) = coproduct(cat, &[a, b]) else {
        return Outcome::Hypothesis(format!("no coproduct {} + {}", name(cat, a), name(cat, b)));
    };
    let Some(f) = f else {
        return match pullback(cat, s.legs[0], s.legs[1]) {
            None => Outcome::Hypothesis(format!("no pullback of the injections into {}", name(cat, s.apex))),
            Some(p) if is_initial(cat, p.apex) => Outcome::Pass,
            Some(p) => Outcome::Violation(format!(
                "injections of {} + {} meet in {}, which is not initial",
                name(cat, a),
                name(cat, b),
                name(cat, p.apex)
            )),
        };
    };
    if cat.target(f) != s.apex {
        return Outcome::Skip;
    }
    let (Some(p1), Some(p2)) = (pullback(cat, s.legs[0], f), pullback(cat, s.legs[1], f)) else {
        return Outcome::Hypothesis(format!("no pullback along {}", cat.arrow_name(f)));
    };
    let Some(c) = coproduct(cat, &[p1.apex, p2.apex]) else {
        return Outcome::Hypothesis(format!("no coproduct {} + {}", name(cat, p1.apex), name(cat, p2.apex)));
    };
    let cocone = Cone { apex: cat.source(f), legs: vec![p1.p2, p2.p2] };
    match factor_through_colimit(cat, &c, &cocone) {
        Some(k) if is_iso(cat, k) => Outcome::Pass,
        _ => Outcome::Violation(format!(
            "pulling {} + {} back along {} does not give a coproduct",
            name(cat, a),
            name(cat, b),
            cat.arrow_name(f)
        )),
    }
}

pub(super) fn coproducts(cat: &FinCategory, t: &mut Tally) {
    for a in cat.objects() {
        for b in cat.objects().filter(|&b| b >= a) {
            let outcome = coproduct_pair(cat, a, b, None);
            let missing = matches!(outcome, Outcome::Hypothesis(_));
            t.record(outcome, || witness(&[a, b], &[]));
            if missing {
                continue;
            }
            if let Some(s) = coproduct(cat, &[a, b]) {
                for f in cat.arrow_ids().filter(|&f| cat.target(f) == s.apex) {
                    t.record(coproduct_pair(cat, a, b, Some(f)), || witness(&[a, b], &[f]));
                }
            }
        }
    }
}

fn fork(cat: &FinCategory, p: &Pullback, q: ArrowId) -> (Diagram, Cone) {
    let d = Diagram::new(vec![p.apex, cat.source(q)]).edge(0, 1, p.p1).edge(0, 1, p.p2);
    let cocone = Cone { apex: cat.target(q), legs: vec![cat.comp(q, p.p1), q] };
    (d, cocone)
}

/// Whether `q` coequalizes its kernel pair; `None` without a kernel pair.
fn is_effective(cat: &FinCategory, q: ArrowId) -> Option<bool> {
    let kp = kernel_pair(cat, q)?;
    let (d, cocone) = fork(cat, &kp, q);
    Some(verify_colimit(cat, &d, &cocone))
}

pub(super) fn epi_coequalizer_at(cat: &FinCategory, f: ArrowId) -> Outcome {
    if !is_epi(cat, f) {
        return Outcome::Skip;
    }
    match is_effective(cat, f) {
        None => Outcome::Hypothesis(format!("no kernel pair of {}", cat.arrow_name(f))),
        Some(true) => Outcome::Pass,
        Some(false) => {
            let kp = kernel_pair(cat, f).expect("checked");
            let coeq = coequalizer(cat, kp.p1, kp.p2)
                .map(|(q, _)| format!("its coequalizer is {}", name(cat, q)))
                .unwrap_or_else(|| "it has no coequalizer".into());
            Outcome::Violation(format!(
                "epi {} is not the coequalizer of its kernel pair; {coeq}",
                cat.arrow_name(f)
            ))
        }
    }
}

pub(super) fn epi_coequalizer(cat: &FinCategory, t: &mut Tally) {
    for f in cat.arrow_ids() {
        t.record(epi_coequalizer_at(cat, f), || witness(&[], &[f]));
    }
}

fn jointly_monic(cat: &FinCategory, r1: ArrowId, r2: ArrowId) -> bool {
    let r = cat.source(r1);
    cat.objects().all(|x| {
        let mut seen: Vec<(ArrowId, ArrowId)> = cat.hom(x, r).iter().map(|&h| (cat.comp(r1, h), cat.comp(r2, h))).collect();
        let n = seen.len();
        seen.sort();
        seen.dedup();
        seen.len() == n
    })
}

fn reflexive(cat: &FinCategory, r1: ArrowId, r2: ArrowId) -> bool {
    let (r, e) = (cat.source(r1), cat.target(r1));
    let id = cat.identity(e);
    cat.hom(e, r).iter().any(|&d| cat.comp(r1, d) == id && cat.comp(r2, d) == id)
}

fn symmetric(cat: &FinCategory, r1: ArrowId, r2: ArrowId) -> bool {
    let r = cat.source(r1);
    cat.hom(r, r).iter().any(|&s| cat.comp(r1, s) == r2 && cat.comp(r2, s) == r1)
}

/// `R` is an equivalence relation on `E` via `(r1, r2)`: it has a quotient
/// and is the kernel pair of it.
pub(super) fn equivalence_at(cat: &FinCategory, r1: ArrowId, r2: ArrowId) -> Outcome {
    if cat.source(r1) != cat.source(r2) || cat.target(r1) != cat.target(r2) {
        return Outcome::Skip;
    }
    if !reflexive(cat, r1, r2) || !symmetric(cat, r1, r2) || !jointly_monic(cat, r1, r2) {
        return Outcome::Skip;
    }
    let r = cat.source(r1);
    let Some(p) = pullback(cat, r2, r1) else {
        return Outcome::Hypothesis(format!("no pullback R x_E R for {}", name(cat, r)));
    };
    let transitive = cat
        .hom(p.apex, r)
        .iter()
        .any(|&m| cat.comp(r1, m) == cat.comp(r1, p.p1) && cat.comp(r2, m) == cat.comp(r2, p.p2));
    if !transitive {
        return Outcome::Skip;
    }
    let rel = format!("{}, {}", cat.arrow_name(r1), cat.arrow_name(r2));
    let Some((_, q)) = coequalizer(cat, r1, r2) else {
        return Outcome::Violation(format!("equivalence relation ({rel}) has no quotient"));
    };
    let Some(kp) = kernel_pair(cat, q) else {
        return Outcome::Hypothesis(format!("no kernel pair of the quotient {}", cat.arrow_name(q)));
    };
    let limit = Cone { apex: kp.apex, legs: vec![kp.p1, kp.p2, cat.comp(q, kp.p1)] };
    let cone = Cone { apex: r, legs: vec![r1, r2, cat.comp(q, r1)] };
    match factor_through(cat, &limit, &cone) {
        Some(k) if is_iso(cat, k) => Outcome::Pass,
        _ => Outcome::Violation(format!(
            "equivalence relation ({rel}) is not the kernel pair of its quotient {}",
            cat.arrow_name(q)
        )),
    }
}

pub(super) fn equivalence_relations(cat: &FinCategory, t: &mut Tally) {
    for e in cat.objects() {
        for r in cat.objects() {
            let hom = cat.hom(r, e);
            for &r1 in hom {
                for &r2 in hom {
                    t.record(equivalence_at(cat, r1, r2), || witness(&[], &[r1, r2]));
                }
            }
        }
    }
}

/// The exact fork on `q` pulled back along `g`.
pub(super) fn exact_fork_at(cat: &FinCategory, q: ArrowId, g: ArrowId) -> Outcome {
    if cat.target(g) != cat.target(q) || is_effective(cat, q) != Some(true) {
        return Outcome::Skip;
    }
    let Some(p) = pullback(cat, q, g) else {
        return Outcome::Hypothesis(format!("no pullback of {} along {}", cat.arrow_name(q), cat.arrow_name(g)));
    };
    match is_effective(cat, p.p2) {
        None => Outcome::Hypothesis(format!("no kernel pair of {}", cat.arrow_name(p.p2))),
        Some(true) => Outcome::Pass,
        Some(false) => Outcome::Violation(format!(
            "exact fork on {} is not exact after pulling back along {}",
            cat.arrow_name(q),
            cat.arrow_name(g)
        )),
    }
}

pub(super) fn exact_forks(cat: &FinCategory, t: &mut Tally) {
    let forks: Vec<ArrowId> = cat.arrow_ids().filter(|&q| is_effective(cat, q) == Some(true)).collect();
    for q in forks {
        for g in cat.arrow_ids().filter(|&g| cat.target(g) == cat.target(q)) {
            t.record(exact_fork_at(cat, q, g), || witness(&[], &[q, g]));
        }
    }
}

pub(super) fn representables(m: &BoundedPresheafCategory) -> Result<Vec<ObjId>> {
    m.base
        .objects()
        .map(|c| {
            let y = yoneda_set(&m.base, c)?;
            m.locate(&y)
                .map(|(a, _)| a)
                .ok_or_else(|| Error::TooLarge(format!("representable {} exceeds the bound", m.base.object_name(c))))
        })
        .collect()
}

fn separated(cat: &FinCategory, gens: &[ObjId], u: ArrowId, v: ArrowId) -> Outcome {
    if u == v || cat.source(u) != cat.source(v) || cat.target(u) != cat.target(v) {
        return Outcome::Skip;
    }
    let x = cat.source(u);
    if gens.iter().any(|&g| cat.hom(g, x).iter().any(|&f| cat.comp(u, f) != cat.comp(v, f))) {
        Outcome::Pass
    } else {
        Outcome::Violation(format!("{} and {} are not separated", cat.arrow_name(u), cat.arrow_name(v)))
    }
}

pub(super) fn generators(cat: &FinCategory, psh: Option<&BoundedPresheafCategory>, gens: &[ObjId], t: &mut Tally) {
    if let Some((u, v)) = separation_witness(cat, gens) {
        t.record(separated(cat, gens, u, v), || witness(gens, &[u, v]));
    } else {
        t.record(Outcome::Pass, || witness(gens, &[]));
    }
    if let Some(m) = psh {
        for (a, p) in m.objects.iter().enumerate() {
            let outcome = match colimit_of_representables_set(p) {
                Ok(c) if c.is_iso => Outcome::Pass,
                Ok(_) => Outcome::Violation(format!("P{a} is not the colimit of its representables")),
                Err(e) => Outcome::Hypothesis(e.to_string()),
            };
            t.record(outcome, || witness(&[ObjId(a)], &[]));
        }
        t.note("representables checked by separation and by colimit of representables on every object");
    }
}

fn arrows<const N: usize>(cat: &FinCategory, arrows: &[ArrowId]) -> Result<[ArrowId; N]> {
    let out: [ArrowId; N] =
        arrows.try_into().map_err(|_| Error::Mismatch(format!("witness needs {N} arrows")))?;
    if let Some(a) = out.iter().find(|a| a.0 >= cat.num_arrows()) {
        return Err(Error::UnknownArrow(format!("#{}", a.0)));
    }
    Ok(out)
}

pub(super) fn replay(cat: &FinCategory, axiom: Axiom, objects: &[ObjId], arrow_ids: &[ArrowId]) -> Result<Outcome> {
    if let Some(x) = objects.iter().find(|x| x.0 >= cat.num_objects()) {
        return Err(Error::UnknownObject(format!("#{}", x.0)));
    }
    Ok(match axiom {
        Axiom::Coproducts => {
            let [a, b]: [ObjId; 2] =
                objects.try_into().map_err(|_| Error::Mismatch("witness needs 2 objects".into()))?;
            let f = match arrow_ids {
                [] => None,
                _ => Some(arrows::<1>(cat, arrow_ids)?[0]),
            };
            coproduct_pair(cat, a, b, f)
        }
        Axiom::EpiCoequalizer => epi_coequalizer_at(cat, arrows::<1>(cat, arrow_ids)?[0]),
        Axiom::EquivalenceRelations => {
            let [r1, r2] = arrows(cat, arrow_ids)?;
            equivalence_at(cat, r1, r2)
        }
        Axiom::ExactForks => {
            let [q, g] = arrows(cat, arrow_ids)?;
            exact_fork_at(cat, q, g)
        }
        Axiom::Generators => {
            let [u, v] = arrows(cat, arrow_ids)?;
            separated(cat, objects, u, v)
        }
    })
}
