//! Brute-force enumeration used by the bounded audits and as test oracles.

use std::collections::BTreeSet;

use super::{hom_module, ring_elements, Factor, FinModule, FinRing, ModuleHom};

fn chains(exponent: u64, bound: u128, min: u64, out: &mut Vec<Vec<u64>>, prefix: &mut Vec<u64>) {
    out.push(prefix.clone());
    let so_far: u128 = prefix.iter().map(|&d| d as u128).product();
    for d in (min.max(2)..=exponent).filter(|d| exponent % d == 0) {
        if prefix.last().map_or(false, |&p| d % p != 0) {
            continue;
        }
        if so_far * d as u128 > bound {
            continue;
        }
        prefix.push(d);
        chains(exponent, bound, d, out, prefix);
        prefix.pop();
    }
}

/// One representative per isomorphism class of modules with at most `bound`
/// elements, in invariant-factor form, ordered by size.
pub fn modules_up_to(ring: &FinRing, bound: u128) -> Vec<FinModule> {
    let mut per_component = Vec::new();
    for &n in ring.components() {
        let mut out = Vec::new();
        chains(n, bound, 2, &mut out, &mut Vec::new());
        per_component.push(out);
    }
    let mut combos: Vec<Vec<Factor>> = vec![Vec::new()];
    for (c, options) in per_component.iter().enumerate() {
        let mut next = Vec::new();
        for prefix in &combos {
            let size: u128 = prefix.iter().map(|f| f.order as u128).product();
            for chain in options {
                let extra: u128 = chain.iter().map(|&d| d as u128).product();
                if size * extra > bound {
                    continue;
                }
                let mut v = prefix.clone();
                v.extend(chain.iter().map(|&order| Factor {
                    component: c,
                    order,
                }));
                next.push(v);
            }
        }
        combos = next;
    }
    let mut mods: Vec<FinModule> = combos
        .into_iter()
        .map(|f| FinModule::with_factors(ring, f).expect("chain orders divide exponent"))
        .collect();
    mods.sort_by_key(|m| (m.size(), m.factors().to_vec()));
    mods
}

/// Every submodule of `m`, as sorted lists of element indices, ordered by
/// size and then lexicographically.
pub fn submodules(m: &FinModule) -> Vec<Vec<usize>> {
    let elems: Vec<_> = m.elements().collect();
    let scalars = ring_elements(m.ring());
    let zero = vec![m.encode(&m.zero_element())];
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    seen.insert(zero.clone());
    let mut queue = vec![zero];
    while let Some(h) = queue.pop() {
        for (gi, g) in elems.iter().enumerate() {
            if h.binary_search(&gi).is_ok() {
                continue;
            }
            let cyclic: BTreeSet<usize> =
                scalars.iter().map(|r| m.encode(&m.scale(r, g))).collect();
            let mut next = BTreeSet::new();
            for &x in &h {
                for &y in &cyclic {
                    next.insert(m.encode(&m.add(&elems[x], &elems[y])));
                }
            }
            let next: Vec<usize> = next.into_iter().collect();
            if seen.insert(next.clone()) {
                queue.push(next);
            }
        }
    }
    let mut all: Vec<Vec<usize>> = seen.into_iter().collect();
    all.sort_by_key(|s| (s.len(), s.clone()));
    all
}

pub fn all_homs(m: &FinModule, n: &FinModule) -> Vec<ModuleHom> {
    hom_module(m, n)
        .map(|h| h.homs().collect())
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::super::{image, kernel};
    use super::*;

    #[test]
    fn module_classes() {
        let r = FinRing::cyclic(4).unwrap();
        let mods = modules_up_to(&r, 16);
        let orders: Vec<Vec<u64>> = mods.iter().map(|m| m.orders()).collect();
        assert_eq!(
            orders,
            vec![
                vec![],
                vec![2],
                vec![2, 2],
                vec![4],
                vec![2, 2, 2],
                vec![2, 4],
                vec![2, 2, 2, 2],
                vec![2, 2, 4],
                vec![4, 4]
            ]
        );
        let r6 = FinRing::cyclic(6).unwrap();
        assert_eq!(modules_up_to(&r6, 16).len(), 9);
    }

    #[test]
    fn submodule_counts() {
        let r = FinRing::cyclic(2).unwrap();
        let m = FinModule::new(&r, &[2, 2]).unwrap();
        assert_eq!(submodules(&m).len(), 5);
        let r4 = FinRing::cyclic(4).unwrap();
        let m = FinModule::new(&r4, &[4]).unwrap();
        assert_eq!(submodules(&m).len(), 3);
    }

    #[test]
    fn kernel_and_image_match_brute_force() {
        let r = FinRing::cyclic(4).unwrap();
        let m = FinModule::new(&r, &[2, 4]).unwrap();
        for h in all_homs(&m, &m) {
            let k = kernel(&h);
            let brute = m
                .elements()
                .filter(|x| h.apply(x).iter().all(|&c| c == 0))
                .count();
            assert_eq!(k.module.card(), brute);
            let im: BTreeSet<_> = m.elements().map(|x| h.apply(&x)).collect();
            assert_eq!(image(&h).module.card(), im.len());
            assert_eq!(k.module.card() * im.len(), m.card());
        }
    }
}
