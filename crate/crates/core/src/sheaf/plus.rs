use std::collections::HashMap;

use super::{constraints, matching_families, restrict_to_sieve, Family};
use crate::category::ArrowId;
use crate::error::{Error, Result};
use crate::modules::{direct_sum_many, kernel, FinModule, ModuleHom};
use crate::presheaf::{ModMorphism, ModPresheaf, Presheaf, SetMorphism, SetPresheaf};
use crate::site::{min_cover, GrothendieckTopology, Sieve};

/// `F+` with its unit `F -> F+` and the least covering sieve used at each
/// object.
#[derive(Clone, Debug)]
pub struct Plus<P: Presheaf> {
    pub presheaf: P,
    pub unit: P::Morphism,
    pub covers: Vec<Sieve>,
}

/// Flavor-specific constructions of the sheaf engine.
pub trait SheafFlavor: Presheaf + Sized {
    fn plus(&self, j: &GrothendieckTopology) -> Result<Plus<Self>>;

    /// Epi in sheaves, decided on the universal test object.
    fn epi_in_sheaves(
        phi: &Self::Morphism,
        src: &Self,
        tgt: &Self,
        j: &GrothendieckTopology,
    ) -> Result<bool>;
}

/// `F+(C) = colim_{S in J(C)} match(S, F)`, evaluated at the least covering
/// sieve, which is the terminal stage of the filtered colimit.
pub fn plus_construction<P: SheafFlavor>(p: &P, j: &GrothendieckTopology) -> Result<Plus<P>> {
    p.plus(j)
}

fn least_covers(j: &GrothendieckTopology) -> Result<Vec<Sieve>> {
    j.base().objects().map(|c| min_cover(j, c)).collect()
}

fn position(s: &Sieve, f: ArrowId) -> usize {
    s.arrows
        .iter()
        .position(|&a| a == f)
        .expect("arrow of the sieve")
}

/// For `h: D -> C`, the positions in `S0(C)` of `h o g` for `g` in `S0(D)`.
fn transfer(j: &GrothendieckTopology, covers: &[Sieve], h: ArrowId) -> Vec<usize> {
    let cat = j.base();
    let (d, c) = (cat.source(h), cat.target(h));
    covers[d.0]
        .arrows
        .iter()
        .map(|&g| position(&covers[c.0], cat.comp(h, g)))
        .collect()
}

fn family_label(p: &SetPresheaf, s: &Sieve, fam: &Family) -> String {
    if fam.is_empty() {
        return "nil".into();
    }
    let cat = p.base();
    let parts: Vec<String> = s
        .arrows
        .iter()
        .zip(fam)
        .map(|(&f, &x)| p.label(cat.source(f), x))
        .collect();
    parts.join(".")
}

impl SheafFlavor for SetPresheaf {
    fn plus(&self, j: &GrothendieckTopology) -> Result<Plus<Self>> {
        let cat = self.base().clone();
        let covers = least_covers(j)?;
        let families: Vec<Vec<Family>> = cat
            .objects()
            .map(|c| matching_families(self, &covers[c.0]))
            .collect();
        let index: Vec<HashMap<&Family, usize>> = families
            .iter()
            .map(|fs| fs.iter().enumerate().map(|(k, f)| (f, k)).collect())
            .collect();
        let values = cat
            .objects()
            .map(|c| {
                families[c.0]
                    .iter()
                    .map(|f| family_label(self, &covers[c.0], f))
                    .collect()
            })
            .collect();
        let restrictions = cat
            .arrow_ids()
            .map(|h| {
                let d = cat.source(h);
                let t = transfer(j, &covers, h);
                families[cat.target(h).0]
                    .iter()
                    .map(|fam| {
                        let moved: Family = t.iter().map(|&k| fam[k]).collect();
                        index[d.0][&moved]
                    })
                    .collect()
            })
            .collect();
        let presheaf = SetPresheaf::new(cat.clone(), values, restrictions)?;
        let unit = SetMorphism {
            components: cat
                .objects()
                .map(|c| {
                    (0..self.card(c))
                        .map(|x| index[c.0][&restrict_to_sieve(self, &covers[c.0], x)])
                        .collect()
                })
                .collect(),
        };
        Ok(Plus {
            presheaf,
            unit,
            covers,
        })
    }

    fn epi_in_sheaves(
        phi: &SetMorphism,
        src: &Self,
        tgt: &Self,
        j: &GrothendieckTopology,
    ) -> Result<bool> {
        super::sheafify::set_epi(phi, src, tgt, j)
    }
}

/// `match(S, F)` as the kernel of the compatibility map
/// `sum_{f in S} F(dom f) -> sum_{(f, g)} F(dom g)`.
struct ModMatch {
    sum: crate::modules::Biproduct,
    inclusion: ModuleHom,
    module: FinModule,
}

fn mod_match(p: &ModPresheaf, s: &Sieve) -> Result<ModMatch> {
    let cat = p.base();
    let ring = p.ring();
    let arrows: Vec<ArrowId> = s.arrows.iter().copied().collect();
    let sum = direct_sum_many(
        ring,
        &arrows
            .iter()
            .map(|&f| p.value(cat.source(f)).clone())
            .collect::<Vec<_>>(),
    )?;
    let checks: Vec<(usize, ArrowId, usize)> =
        constraints(p, &arrows).into_iter().flatten().collect();
    let targets = direct_sum_many(
        ring,
        &checks
            .iter()
            .map(|&(_, g, _)| p.value(cat.source(g)).clone())
            .collect::<Vec<_>>(),
    )?;
    let mut delta = ModuleHom::zero(&sum.sum, &targets.sum);
    for (t, &(k, g, m)) in checks.iter().enumerate() {
        let diff = sum.projections[m].sub(&p.restriction(g).compose(&sum.projections[k])?)?;
        delta = delta.add(&targets.injections[t].compose(&diff)?)?;
    }
    let k = kernel(&delta);
    Ok(ModMatch {
        sum,
        inclusion: k.map,
        module: k.module,
    })
}

impl SheafFlavor for ModPresheaf {
    fn plus(&self, j: &GrothendieckTopology) -> Result<Plus<Self>> {
        let cat = self.base().clone();
        let covers = least_covers(j)?;
        let matches: Vec<ModMatch> = cat
            .objects()
            .map(|c| mod_match(self, &covers[c.0]))
            .collect::<Result<_>>()?;
        let mut restrictions = Vec::new();
        for h in cat.arrow_ids() {
            let (d, c) = (cat.source(h), cat.target(h));
            let t = transfer(j, &covers, h);
            let (md, mc) = (&matches[d.0], &matches[c.0]);
            let mut r = ModuleHom::zero(&mc.sum.sum, &md.sum.sum);
            for (n, &k) in t.iter().enumerate() {
                r = r.add(&md.sum.injections[n].compose(&mc.sum.projections[k])?)?;
            }
            let moved = r.compose(&mc.inclusion)?;
            restrictions.push(
                moved
                    .lift_through(&md.inclusion)
                    .ok_or_else(|| Error::Internal("restricted family is not matching".into()))?,
            );
        }
        let mut unit = Vec::new();
        for c in cat.objects() {
            let m = &matches[c.0];
            let mut e = ModuleHom::zero(self.value(c), &m.sum.sum);
            for (k, &f) in covers[c.0].arrows.iter().enumerate() {
                e = e.add(&m.sum.injections[k].compose(self.restriction(f))?)?;
            }
            unit.push(
                e.lift_through(&m.inclusion)
                    .ok_or_else(|| Error::Internal("restricted element is not matching".into()))?,
            );
        }
        let values = matches.iter().map(|m| m.module.clone()).collect();
        let presheaf = ModPresheaf::new(cat.clone(), self.ring(), values, restrictions)?;
        Ok(Plus {
            presheaf,
            unit: ModMorphism::new(unit),
            covers,
        })
    }

    fn epi_in_sheaves(
        phi: &ModMorphism,
        src: &Self,
        tgt: &Self,
        j: &GrothendieckTopology,
    ) -> Result<bool> {
        super::sheafify::mod_epi(phi, src, tgt, j)
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Recomputes `F+(C)` as the filtered colimit over all covering sieves,
/// gluing a family on `S` to its restriction on each covering `T` inside
/// `S`, and checks it against the least-cover shortcut: same cardinality,
/// and the families on the least cover meet every class exactly once.
pub fn min_cover_agrees<P: Presheaf>(p: &P, j: &GrothendieckTopology, plus: &Plus<P>) -> bool {
    let cat = p.base();
    for c in cat.objects() {
        let sieves: Vec<&Sieve> = j.covering(c).collect();
        let fams: Vec<Vec<Family>> = sieves.iter().map(|s| matching_families(p, s)).collect();
        let mut offset = Vec::new();
        let mut total = 0;
        for f in &fams {
            offset.push(total);
            total += f.len();
        }
        let index: Vec<HashMap<&Family, usize>> = fams
            .iter()
            .map(|fs| fs.iter().enumerate().map(|(k, f)| (f, k)).collect())
            .collect();
        let mut parent: Vec<usize> = (0..total).collect();
        for (a, s) in sieves.iter().enumerate() {
            for (b, t) in sieves.iter().enumerate() {
                if a == b || !t.is_subset(s) {
                    continue;
                }
                let picks: Vec<usize> = t.arrows.iter().map(|&f| position(s, f)).collect();
                for (k, fam) in fams[a].iter().enumerate() {
                    let r: Family = picks.iter().map(|&q| fam[q]).collect();
                    let (x, y) = (
                        find(&mut parent, offset[a] + k),
                        find(&mut parent, offset[b] + index[b][&r]),
                    );
                    parent[x.max(y)] = x.min(y);
                }
            }
        }
        let mut classes: Vec<usize> = (0..total).map(|x| find(&mut parent, x)).collect();
        let Some(least) = sieves.iter().position(|s| **s == plus.covers[c.0]) else {
            return false;
        };
        let mut from_least: Vec<usize> = (0..fams[least].len())
            .map(|k| classes[offset[least] + k])
            .collect();
        classes.sort();
        classes.dedup();
        from_least.sort();
        let before = from_least.len();
        from_least.dedup();
        if before != from_least.len()
            || from_least != classes
            || classes.len() != plus.presheaf.card(c)
        {
            return false;
        }
    }
    true
}
