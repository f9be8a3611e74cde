use super::{ModMorphism, ModPresheaf, Presheaf, SetMorphism, SetPresheaf};
use crate::category::{ArrowId, ObjId};
use crate::modules::{all_homs, ModuleHom};

/// All natural transformations `p -> q`, in lexicographic order of their
/// component tables (objects in declaration order, then elements).
///
/// Each pair `(C, x)` is a variable valued in `q(C)`; a constraint
/// `alpha_D(x . f) = alpha_C(x) . f` is checked as soon as both sides are
/// assigned.
pub fn set_nat_transformations(p: &SetPresheaf, q: &SetPresheaf) -> Vec<SetMorphism> {
    set_search(p, q, false, usize::MAX)
}

/// The first `limit` transformations in the same order.
pub fn set_nat_transformations_up_to(p: &SetPresheaf, q: &SetPresheaf, limit: usize) -> Vec<SetMorphism> {
    set_search(p, q, false, limit)
}

/// Some isomorphism `p -> q`: the same search with every component
/// injective, stopped at the first hit.
pub fn set_isomorphism(p: &SetPresheaf, q: &SetPresheaf) -> Option<SetMorphism> {
    let cat = p.base();
    if cat.objects().any(|c| p.card(c) != q.card(c)) {
        return None;
    }
    set_search(p, q, true, 1).pop()
}

fn set_search(p: &SetPresheaf, q: &SetPresheaf, injective: bool, limit: usize) -> Vec<SetMorphism> {
    let cat = p.base();
    let mut order: Vec<ObjId> = cat.objects().collect();
    if injective {
        // targets first, so that restrictions pin down the sources early
        order.sort_by_key(|&c| std::cmp::Reverse(cat.arrows_into(c).len()));
    }
    let mut offset = vec![0; cat.num_objects()];
    let mut vars: Vec<(ObjId, usize)> = Vec::new();
    for c in order {
        offset[c.0] = vars.len();
        vars.extend((0..p.card(c)).map(|x| (c, x)));
    }
    if vars.iter().any(|&(c, _)| q.card(c) == 0) {
        return Vec::new();
    }
    let holds = |assign: &[usize], f: ArrowId, x: usize| {
        let (d, c) = (cat.source(f), cat.target(f));
        let vc = offset[c.0] + x;
        let vd = offset[d.0] + p.restrict(f, x);
        assign[vd] == q.restrict(f, assign[vc])
    };
    // each square is checked at the later of its two variables
    let mut checks: Vec<Vec<(ArrowId, usize)>> = vec![Vec::new(); vars.len()];
    for f in cat.arrow_ids() {
        let (d, c) = (cat.source(f), cat.target(f));
        for x in 0..p.card(c) {
            let vc = offset[c.0] + x;
            let vd = offset[d.0] + p.restrict(f, x);
            checks[vc.max(vd)].push((f, x));
        }
    }

    let n = vars.len();
    let mut out = Vec::new();
    let mut assign = vec![0usize; n];
    // used[C][y]: some earlier element of p(C) is sent to y
    let mut used: Vec<Vec<bool>> = cat.objects().map(|c| vec![false; q.card(c)]).collect();
    let mut k = 0usize;
    let mut fresh = true;
    loop {
        if k == n {
            let mut components: Vec<Vec<usize>> =
                cat.objects().map(|c| vec![0; p.card(c)]).collect();
            for (v, &(c, x)) in vars.iter().enumerate() {
                components[c.0][x] = assign[v];
            }
            out.push(SetMorphism { components });
            if n == 0 || out.len() >= limit {
                break;
            }
            k -= 1;
            fresh = false;
        }
        let c = vars[k].0;
        let bound = q.card(c);
        if fresh {
            assign[k] = 0;
        } else {
            if injective {
                used[c.0][assign[k]] = false;
            }
            assign[k] += 1;
        }
        while assign[k] < bound
            && ((injective && used[c.0][assign[k]]) || !checks[k].iter().all(|&(f, x)| holds(&assign, f, x)))
        {
            assign[k] += 1;
        }
        if assign[k] < bound {
            if injective {
                used[c.0][assign[k]] = true;
            }
            k += 1;
            fresh = true;
        } else if k == 0 {
            break;
        } else {
            k -= 1;
            fresh = false;
        }
    }
    out
}

/// All natural transformations `p -> q` between module presheaves, ordered
/// by the per-object enumeration of [`all_homs`].
pub fn mod_nat_transformations(p: &ModPresheaf, q: &ModPresheaf) -> Vec<ModMorphism> {
    let cat = p.base();
    let n = cat.num_objects();
    let choices: Vec<Vec<ModuleHom>> = cat
        .objects()
        .map(|c| all_homs(p.value(c), q.value(c)))
        .collect();
    if choices.iter().any(Vec::is_empty) {
        return Vec::new();
    }
    let square = |assign: &[usize], f| {
        let (d, c) = (cat.source(f), cat.target(f));
        let a_c = &choices[c.0][assign[c.0]];
        let a_d = &choices[d.0][assign[d.0]];
        q.restriction(f).compose(a_c).ok() == a_d.compose(p.restriction(f)).ok()
    };
    let checks: Vec<Vec<ArrowId>> = (0..n)
        .map(|k| {
            cat.arrow_ids()
                .filter(|&f| cat.source(f).0.max(cat.target(f).0) == k && !cat.is_identity(f))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut assign = vec![0usize; n];
    let mut k = 0usize;
    let mut fresh = true;
    loop {
        if k == n {
            out.push(ModMorphism::new(
                (0..n).map(|c| choices[c][assign[c]].clone()).collect(),
            ));
            if n == 0 {
                break;
            }
            k -= 1;
            fresh = false;
        }
        if fresh {
            assign[k] = 0;
        } else {
            assign[k] += 1;
        }
        while assign[k] < choices[k].len() && !checks[k].iter().all(|&f| square(&assign, f)) {
            assign[k] += 1;
        }
        if assign[k] < choices[k].len() {
            k += 1;
            fresh = true;
        } else if k == 0 {
            break;
        } else {
            k -= 1;
            fresh = false;
        }
    }
    out
}
