//! Bounded presheaf categories as explicit finite categories.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use crate::category::{Arrow, ArrowId, FinCategory, ObjId};
use crate::error::{Error, Result};
use crate::presheaf::{
    isomorphic, set_nat_transformations_up_to, Presheaf, PresheafMorphism, SetMorphism, SetPresheaf,
};
use crate::sheaf::is_sheaf;
use crate::site::GrothendieckTopology;

/// Size limits for [`materialize`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    /// Largest value set at any object.
    pub value_size: usize,
    pub max_objects: usize,
    pub max_arrows: usize,
    /// Candidate restriction tables tried over the whole enumeration.
    pub max_tables: usize,
}

impl Bounds {
    pub fn values(value_size: usize) -> Self {
        Bounds { value_size, max_objects: 256, max_arrows: 20_000, max_tables: 1 << 20 }
    }
}

/// Set-valued presheaves on `base` with every value of size at most the
/// bound, one per isomorphism class, and all natural transformations.
#[derive(Clone, Debug)]
pub struct BoundedPresheafCategory {
    pub base: Arc<FinCategory>,
    pub bounds: Bounds,
    pub category: Arc<FinCategory>,
    pub objects: Vec<SetPresheaf>,
    pub morphisms: Vec<SetMorphism>,
    index: HashMap<(usize, usize, SetMorphism), ArrowId>,
}

fn check(cancel: &AtomicBool) -> Result<()> {
    if cancel.load(Ordering::Relaxed) {
        Err(Error::Cancelled)
    } else {
        Ok(())
    }
}

fn element_names(n: usize) -> Vec<String> {
    (0..n).map(|k| format!("x{k}")).collect()
}

/// Every presheaf with the given value sizes; identities are fixed and the
/// remaining tables range over all functions, filtered by functoriality.
fn presheaves_with_sizes(
    base: &Arc<FinCategory>,
    sizes: &[usize],
    cancel: &AtomicBool,
) -> Result<Vec<SetPresheaf>> {
    let free: Vec<ArrowId> = base.arrow_ids().filter(|&f| !base.is_identity(f)).collect();
    let counts: Vec<usize> = free
        .iter()
        .map(|&f| sizes[base.source(f).0].pow(sizes[base.target(f).0] as u32))
        .collect();
    let total: usize = counts.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c)).ok_or_else(|| {
        Error::TooLarge("restriction tables overflow".into())
    })?;
    let mut out = Vec::new();
    let values: Vec<Vec<String>> = sizes.iter().map(|&n| element_names(n)).collect();
    for code in 0..total {
        if code % 1024 == 0 {
            check(cancel)?;
        }
        let mut rest = code;
        let mut tables: Vec<Vec<usize>> =
            base.arrow_ids().map(|f| (0..sizes[base.target(f).0]).collect()).collect();
        for (k, &f) in free.iter().enumerate() {
            let mut choice = rest % counts[k];
            rest /= counts[k];
            let (s, t) = (sizes[base.source(f).0], sizes[base.target(f).0]);
            tables[f.0] = (0..t)
                .map(|_| {
                    let x = choice % s;
                    choice /= s;
                    x
                })
                .collect();
        }
        if let Ok(p) = SetPresheaf::new(base.clone(), values.clone(), tables) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Restriction tables tried over all value sizes up to `value_size`.
fn candidate_count(base: &FinCategory, value_size: usize) -> Option<usize> {
    let free: Vec<ArrowId> = base.arrow_ids().filter(|&f| !base.is_identity(f)).collect();
    let n = base.num_objects();
    let mut sizes = vec![0usize; n];
    let mut total = 0usize;
    loop {
        let mut count = 1usize;
        for &f in &free {
            count = count.checked_mul(sizes[base.source(f).0].checked_pow(sizes[base.target(f).0] as u32)?)?;
        }
        total = total.checked_add(count)?;
        let Some(k) = (0..n).find(|&k| sizes[k] < value_size) else { return Some(total) };
        sizes[k] += 1;
        for s in sizes.iter_mut().take(k) {
            *s = 0;
        }
    }
}

/// Value sizes, then for every arrow the sorted sizes of the fibers of its
/// restriction map; equal for isomorphic presheaves.
fn fingerprint(p: &SetPresheaf) -> Vec<Vec<usize>> {
    let cat = p.base();
    let mut out = vec![cat.objects().map(|c| p.card(c)).collect()];
    for f in cat.arrow_ids() {
        let mut fibers = vec![0; p.card(cat.source(f))];
        for x in 0..p.card(cat.target(f)) {
            fibers[p.restrict(f, x)] += 1;
        }
        fibers.sort_unstable();
        out.push(fibers);
    }
    out
}

/// Enumerates the bounded presheaf category, or its full subcategory of
/// sheaves when `topology` is given. Honors `cancel` between steps.
pub fn materialize(
    base: &Arc<FinCategory>,
    bounds: Bounds,
    topology: Option<&GrothendieckTopology>,
    cancel: &AtomicBool,
) -> Result<BoundedPresheafCategory> {
    let n = base.num_objects();
    if candidate_count(base, bounds.value_size).is_none_or(|t| t > bounds.max_tables) {
        return Err(Error::TooLarge(format!(
            "more than {} candidate restriction tables at value size {}",
            bounds.max_tables, bounds.value_size
        )));
    }
    let mut objects: Vec<SetPresheaf> = Vec::new();
    let mut sizes = vec![0usize; n];
    let mut buckets: HashMap<Vec<Vec<usize>>, Vec<usize>> = HashMap::new();
    loop {
        for p in presheaves_with_sizes(base, &sizes, cancel)? {
            check(cancel)?;
            if topology.is_some_and(|j| !is_sheaf(&p, j)) {
                continue;
            }
            let key = fingerprint(&p);
            let bucket = buckets.entry(key).or_default();
            if !bucket.iter().any(|&q| isomorphic(&objects[q], &p)) {
                bucket.push(objects.len());
                objects.push(p);
                if objects.len() > bounds.max_objects {
                    return Err(Error::TooLarge(format!("more than {} objects", bounds.max_objects)));
                }
            }
        }
        let Some(k) = (0..n).find(|&k| sizes[k] < bounds.value_size) else { break };
        sizes[k] += 1;
        for s in sizes.iter_mut().take(k) {
            *s = 0;
        }
    }

    let mut arrows = Vec::new();
    let mut morphisms = Vec::new();
    let mut index = HashMap::new();
    let mut identities = vec![ArrowId(0); objects.len()];
    for (a, p) in objects.iter().enumerate() {
        for (b, q) in objects.iter().enumerate() {
            check(cancel)?;
            let room = bounds.max_arrows.saturating_sub(arrows.len());
            let ms = set_nat_transformations_up_to(p, q, room + 1);
            if ms.len() > room {
                return Err(Error::TooLarge(format!("more than {} arrows", bounds.max_arrows)));
            }
            for (k, m) in ms.into_iter().enumerate() {
                let id = ArrowId(arrows.len());
                let name = if a == b && m == p.identity_morphism() {
                    identities[a] = id;
                    format!("id_P{a}")
                } else {
                    format!("m{a}_{b}_{k}")
                };
                arrows.push(Arrow { name, source: ObjId(a), target: ObjId(b) });
                index.insert((a, b, m.clone()), id);
                morphisms.push(m);
                if arrows.len() > bounds.max_arrows {
                    return Err(Error::TooLarge(format!("more than {} arrows", bounds.max_arrows)));
                }
            }
        }
    }
    let names = (0..objects.len()).map(|a| format!("P{a}")).collect();
    let category = FinCategory::from_parts(names, arrows.clone(), identities, |g, f| {
        let m = morphisms[f.0].then(&morphisms[g.0]);
        index.get(&(arrows[f.0].source.0, arrows[g.0].target.0, m)).copied()
    })?;
    Ok(BoundedPresheafCategory { base: base.clone(), bounds, category: Arc::new(category), objects, morphisms, index })
}

impl BoundedPresheafCategory {
    /// The object isomorphic to `p`, with an isomorphism `p -> object`.
    pub fn locate(&self, p: &SetPresheaf) -> Option<(ObjId, SetMorphism)> {
        self.objects.iter().enumerate().find_map(|(a, q)| {
            p.isomorphism(q).map(|m| (ObjId(a), m))
        })
    }

    pub fn arrow_of(&self, a: ObjId, b: ObjId, m: &SetMorphism) -> Option<ArrowId> {
        self.index.get(&(a.0, b.0, m.clone())).copied()
    }

    pub fn presheaf(&self, a: ObjId) -> &SetPresheaf {
        &self.objects[a.0]
    }

    pub fn morphism(&self, f: ArrowId) -> &SetMorphism {
        &self.morphisms[f.0]
    }
}
