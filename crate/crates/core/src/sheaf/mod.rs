//! Matching families, the sheaf condition, the plus-construction,
//! sheafification and local surjectivity.

mod plus;
mod sheafify;

use std::collections::HashMap;

use crate::category::{pullback, ArrowId, ObjId};
use crate::presheaf::{Presheaf, PresheafMorphism};
use crate::site::{Basis, GrothendieckTopology, Sieve};

pub use plus::{min_cover_agrees, plus_construction, Plus, SheafFlavor};
pub use sheafify::{factor_through_unit, sheaf_epi_check, sheafify, sheafify_map, EpiReport, Sheafified};

/// A matching family on a sieve: one element per arrow, aligned with
/// the sieve's arrows in ascending order.
pub type Family = Vec<usize>;

/// Compatibility constraints `x_{f o g} = x_f . g`, as
/// `(position of f, g, position of f o g)`, grouped by the later position.
fn constraints<P: Presheaf>(p: &P, arrows: &[ArrowId]) -> Vec<Vec<(usize, ArrowId, usize)>> {
    let cat = p.base();
    let pos: HashMap<ArrowId, usize> = arrows.iter().enumerate().map(|(k, &a)| (a, k)).collect();
    let mut out = vec![Vec::new(); arrows.len()];
    for (k, &f) in arrows.iter().enumerate() {
        for &g in cat.arrows_into(cat.source(f)) {
            if cat.is_identity(g) {
                continue;
            }
            let m = pos[&cat.comp(f, g)];
            out[k.max(m)].push((k, g, m));
        }
    }
    out
}

/// Every matching family for `p` on `s`, in lexicographic order.
pub fn matching_families<P: Presheaf>(p: &P, s: &Sieve) -> Vec<Family> {
    let cat = p.base();
    let arrows: Vec<ArrowId> = s.arrows.iter().copied().collect();
    let n = arrows.len();
    let checks = constraints(p, &arrows);
    let sizes: Vec<usize> = arrows.iter().map(|&f| p.card(cat.source(f))).collect();
    if sizes.iter().any(|&z| z == 0) {
        return Vec::new();
    }
    let holds = |x: &[usize], k: usize| {
        checks[k]
            .iter()
            .all(|&(a, g, b)| x[b] == p.restrict(g, x[a]))
    };
    let mut out = Vec::new();
    let mut x = vec![0usize; n];
    let mut k = 0usize;
    let mut fresh = true;
    loop {
        if k == n {
            out.push(x.clone());
            if n == 0 {
                break;
            }
            k -= 1;
            fresh = false;
        }
        if fresh {
            x[k] = 0;
        } else {
            x[k] += 1;
        }
        while x[k] < sizes[k] && !holds(&x, k) {
            x[k] += 1;
        }
        if x[k] < sizes[k] {
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

/// The family `(x . f)_{f in S}`.
pub fn restrict_to_sieve<P: Presheaf>(p: &P, s: &Sieve, x: usize) -> Family {
    s.arrows.iter().map(|&f| p.restrict(f, x)).collect()
}

/// Every `x` in `p(C)` with `x . f = fam(f)` for all `f` in `s`.
pub fn amalgamations<P: Presheaf>(p: &P, s: &Sieve, fam: &[usize]) -> Vec<usize> {
    (0..p.card(s.codomain))
        .filter(|&x| restrict_to_sieve(p, s, x) == fam)
        .collect()
}

/// A covering sieve with a matching family whose amalgamations are not
/// exactly one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SheafWitness {
    pub object: ObjId,
    pub sieve: Sieve,
    pub family: Family,
    pub amalgamations: Vec<usize>,
}

impl SheafWitness {
    pub fn family_labels<P: Presheaf>(&self, p: &P) -> Vec<String> {
        let cat = p.base();
        self.sieve
            .arrows
            .iter()
            .zip(&self.family)
            .map(|(&f, &x)| p.label(cat.source(f), x))
            .collect()
    }
}

fn ordered_covers(j: &GrothendieckTopology, c: ObjId) -> Vec<&Sieve> {
    let mut v: Vec<&Sieve> = j.covering(c).collect();
    v.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.arrows.cmp(&b.arrows)));
    v
}

/// First failure, objects in declaration order and sieves smallest first;
/// `accept` decides whether an amalgamation count is acceptable.
fn first_failure<P: Presheaf>(
    p: &P,
    j: &GrothendieckTopology,
    accept: impl Fn(usize) -> bool,
) -> Option<SheafWitness> {
    let cat = p.base();
    for c in cat.objects() {
        for s in ordered_covers(j, c) {
            let mut images: HashMap<Family, Vec<usize>> = HashMap::new();
            for x in 0..p.card(c) {
                images
                    .entry(restrict_to_sieve(p, s, x))
                    .or_default()
                    .push(x);
            }
            for fam in matching_families(p, s) {
                let amalg = images.get(&fam).cloned().unwrap_or_default();
                if !accept(amalg.len()) {
                    return Some(SheafWitness {
                        object: c,
                        sieve: s.clone(),
                        family: fam,
                        amalgamations: amalg,
                    });
                }
            }
        }
    }
    None
}

pub fn sheaf_witness<P: Presheaf>(p: &P, j: &GrothendieckTopology) -> Option<SheafWitness> {
    first_failure(p, j, |n| n == 1)
}

pub fn separation_failure<P: Presheaf>(p: &P, j: &GrothendieckTopology) -> Option<SheafWitness> {
    first_failure(p, j, |n| n <= 1)
}

pub fn is_sheaf<P: Presheaf>(p: &P, j: &GrothendieckTopology) -> bool {
    sheaf_witness(p, j).is_none()
}

pub fn is_separated<P: Presheaf>(p: &P, j: &GrothendieckTopology) -> bool {
    separation_failure(p, j).is_none()
}

/// The sheaf condition on the covering families of a basis, with
/// compatibility on pullbacks `C_i x_C C_j`. `None` when a needed pullback
/// is missing from the base.
pub fn is_sheaf_on_basis<P: Presheaf>(p: &P, basis: &Basis) -> Option<bool> {
    let cat = p.base();
    for c in cat.objects() {
        for fam in basis.families(c) {
            let n = fam.arrows.len();
            let mut pbs = vec![vec![None; n]; n];
            for a in 0..n {
                for b in 0..n {
                    pbs[a][b] = Some(pullback(cat, fam.arrows[a], fam.arrows[b])?);
                }
            }
            let sizes: Vec<usize> = fam.arrows.iter().map(|&f| p.card(cat.source(f))).collect();
            let mut images: HashMap<Vec<usize>, usize> = HashMap::new();
            for x in 0..p.card(c) {
                let fam_x: Vec<usize> = fam.arrows.iter().map(|&f| p.restrict(f, x)).collect();
                *images.entry(fam_x).or_default() += 1;
            }
            let mut x = vec![0usize; n];
            let total: usize = sizes.iter().product();
            for mut code in 0..total {
                for k in 0..n {
                    x[k] = code % sizes[k];
                    code /= sizes[k];
                }
                let matching = (0..n).all(|a| {
                    (0..n).all(|b| {
                        let pb = pbs[a][b].expect("pullback");
                        p.restrict(pb.p1, x[a]) == p.restrict(pb.p2, x[b])
                    })
                });
                if matching && images.get(&x).copied().unwrap_or(0) != 1 {
                    return Some(false);
                }
            }
        }
    }
    Some(true)
}

/// `(C, y)` such that no covering sieve pulls `y` back into the image of
/// `phi`.
pub fn local_surjectivity_witness<P: Presheaf>(
    phi: &P::Morphism,
    src: &P,
    tgt: &P,
    j: &GrothendieckTopology,
) -> Option<(ObjId, usize)> {
    let cat = tgt.base();
    let images: Vec<Vec<bool>> = cat
        .objects()
        .map(|c| {
            let mut hit = vec![false; tgt.card(c)];
            for x in 0..src.card(c) {
                hit[phi.apply(c, x)] = true;
            }
            hit
        })
        .collect();
    for c in cat.objects() {
        for y in 0..tgt.card(c) {
            let s = Sieve {
                codomain: c,
                arrows: cat
                    .arrows_into(c)
                    .iter()
                    .copied()
                    .filter(|&f| images[cat.source(f).0][tgt.restrict(f, y)])
                    .collect(),
            };
            if !j.covers(&s) {
                return Some((c, y));
            }
        }
    }
    None
}

pub fn is_locally_surjective<P: Presheaf>(
    phi: &P::Morphism,
    src: &P,
    tgt: &P,
    j: &GrothendieckTopology,
) -> bool {
    local_surjectivity_witness(phi, src, tgt, j).is_none()
}

#[cfg(test)]
pub(crate) mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::category::FinCategory;
    use crate::presheaf::{yoneda_set, SetMorphism, SetPresheaf, SetPresheafBuilder};
    use crate::site::fixtures::{j2, j2_basis};

    pub(crate) fn f_c2(cat: &Arc<FinCategory>) -> SetPresheaf {
        SetPresheafBuilder::new(cat.clone())
            .value("V", ["p"])
            .unwrap()
            .value("U", ["a", "b"])
            .unwrap()
            .restriction("i", [("p", "a")])
            .unwrap()
            .build()
            .unwrap()
    }

    #[test]
    fn families_on_c2() {
        let (cat, j) = j2();
        let f = f_c2(&cat);
        let (u, v) = (
            cat.object_by_name("U").unwrap(),
            cat.object_by_name("V").unwrap(),
        );
        let i = cat.arrow_by_name("i").unwrap();
        let s = Sieve::new(&cat, v, [i]).unwrap();
        assert_eq!(matching_families(&f, &s), vec![vec![0], vec![1]]);
        for c in [u, v] {
            let m = Sieve::maximal(&cat, c);
            assert_eq!(matching_families(&f, &m).len(), f.card(c));
            for x in 0..f.card(c) {
                assert_eq!(
                    amalgamations(&f, &m, &restrict_to_sieve(&f, &m, x)),
                    vec![x]
                );
            }
        }
        assert_eq!(
            matching_families(&f, &Sieve::empty(v)),
            vec![Vec::<usize>::new()]
        );
        assert_eq!(amalgamations(&f, &s, &[0]), vec![0]);
        assert!(amalgamations(&f, &s, &[1]).is_empty());

        let w = sheaf_witness(&f, &j).unwrap();
        assert_eq!(
            (w.object, w.sieve.clone(), w.family.clone()),
            (v, s, vec![1])
        );
        assert_eq!(w.family_labels(&f), ["b"]);
        assert!(is_separated(&f, &j));
        assert!(is_sheaf(&yoneda_set(&cat, v).unwrap(), &j));
        assert!(is_sheaf(
            &f,
            &crate::site::GrothendieckTopology::trivial(cat.clone())
        ));
        assert_eq!(is_sheaf_on_basis(&f, &j2_basis(&cat)), Some(false));
        assert_eq!(
            is_sheaf_on_basis(&yoneda_set(&cat, v).unwrap(), &j2_basis(&cat)),
            Some(true)
        );
    }

    #[test]
    fn local_surjectivity_cases() {
        let (cat, j) = j2();
        let f = f_c2(&cat);
        let u = cat.object_by_name("U").unwrap();
        let id = f.identity_morphism();
        assert!(is_locally_surjective(&id, &f, &f, &j));
        let empty = SetPresheaf::empty(cat.clone());
        let none = SetMorphism {
            components: vec![vec![], vec![]],
        };
        assert_eq!(
            local_surjectivity_witness(&none, &empty, &f, &j),
            Some((u, 0))
        );
        // a subpresheaf hitting only `a` at U and nothing at V
        let sub = SetPresheafBuilder::new(cat.clone())
            .value("V", Vec::<String>::new())
            .unwrap()
            .value("U", ["a"])
            .unwrap()
            .restriction("i", Vec::<(String, String)>::new())
            .unwrap()
            .build()
            .unwrap();
        let incl = SetMorphism {
            components: vec![vec![0], vec![]],
        };
        let w = local_surjectivity_witness(&incl, &sub, &f, &j).unwrap();
        assert_eq!(w, (u, 1));
    }
}
