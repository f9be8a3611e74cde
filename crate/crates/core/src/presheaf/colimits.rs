use std::collections::HashMap;
use std::sync::Arc;

use super::{ModMorphism, ModPresheaf, Presheaf, PresheafMorphism, SetMorphism, SetPresheaf};
use crate::category::{FinCategory, ObjId};
use crate::error::{Error, Result};
use crate::modules::{colimit, direct_sum_many, limit, FinModule, FinRing, ModDiagram, ModuleHom};

#[derive(Clone, Debug)]
pub struct SetPresheafDiagram {
    pub base: Arc<FinCategory>,
    pub nodes: Vec<SetPresheaf>,
    pub edges: Vec<(usize, usize, SetMorphism)>,
}

#[derive(Clone, Debug)]
pub struct ModPresheafDiagram {
    pub base: Arc<FinCategory>,
    pub ring: FinRing,
    pub nodes: Vec<ModPresheaf>,
    pub edges: Vec<(usize, usize, ModMorphism)>,
}

/// A (co)limiting cone: legs point from the apex for limits and into it for
/// colimits.
#[derive(Clone, Debug)]
pub struct PointwiseCone<P: Presheaf> {
    pub apex: P,
    pub legs: Vec<P::Morphism>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn check_edges(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> Result<()> {
    for (a, b) in edges {
        if a >= n || b >= n {
            return Err(Error::Mismatch(format!(
                "edge {a} -> {b} outside {n} nodes"
            )));
        }
    }
    Ok(())
}

/// Objectwise quotient of the disjoint union by the edge relation.
pub fn set_pointwise_colimit(d: &SetPresheafDiagram) -> Result<PointwiseCone<SetPresheaf>> {
    check_edges(d.nodes.len(), d.edges.iter().map(|e| (e.0, e.1)))?;
    let cat = &d.base;
    let mut values = Vec::new();
    let mut reps_by_obj = Vec::new();
    // class[c][j][x]
    let mut class: Vec<Vec<Vec<usize>>> = Vec::new();
    for c in cat.objects() {
        let offsets: Vec<usize> = d
            .nodes
            .iter()
            .scan(0, |acc, p| {
                let o = *acc;
                *acc += p.card(c);
                Some(o)
            })
            .collect();
        let total: usize = d.nodes.iter().map(|p| p.card(c)).sum();
        let mut parent: Vec<usize> = (0..total).collect();
        for (a, b, m) in &d.edges {
            for x in 0..d.nodes[*a].card(c) {
                let (u, v) = (
                    find(&mut parent, offsets[*a] + x),
                    find(&mut parent, offsets[*b] + m.apply(c, x)),
                );
                let (lo, hi) = (u.min(v), u.max(v));
                parent[hi] = lo;
            }
        }
        let mut ids = HashMap::new();
        let mut reps = Vec::new();
        let mut per_node = Vec::new();
        for (j, p) in d.nodes.iter().enumerate() {
            let mut row = Vec::new();
            for x in 0..p.card(c) {
                let r = find(&mut parent, offsets[j] + x);
                let next = ids.len();
                let id = *ids.entry(r).or_insert_with(|| {
                    reps.push((j, x));
                    next
                });
                row.push(id);
            }
            per_node.push(row);
        }
        let labels: Vec<String> = reps.iter().map(|&(j, x)| d.nodes[j].label(c, x)).collect();
        let unique = labels
            .iter()
            .enumerate()
            .all(|(k, l)| !labels[..k].contains(l));
        let labels = if unique {
            labels
        } else {
            reps.iter()
                .map(|&(j, x)| format!("{}@{j}", d.nodes[j].label(c, x)))
                .collect()
        };
        values.push(labels);
        class.push(per_node);
        reps_by_obj.push(reps);
    }
    let restrictions = cat
        .arrow_ids()
        .map(|f| {
            let (s, t) = (cat.source(f), cat.target(f));
            reps_by_obj[t.0]
                .iter()
                .map(|&(j, x)| class[s.0][j][d.nodes[j].restrict(f, x)])
                .collect()
        })
        .collect();
    let apex = SetPresheaf::new(cat.clone(), values, restrictions)?;
    let legs = (0..d.nodes.len())
        .map(|j| SetMorphism {
            components: cat.objects().map(|c| class[c.0][j].clone()).collect(),
        })
        .collect();
    Ok(PointwiseCone { apex, legs })
}

/// Objectwise set of compatible tuples.
pub fn set_pointwise_limit(d: &SetPresheafDiagram) -> Result<PointwiseCone<SetPresheaf>> {
    check_edges(d.nodes.len(), d.edges.iter().map(|e| (e.0, e.1)))?;
    let cat = &d.base;
    let n = d.nodes.len();
    let mut tuples: Vec<Vec<Vec<usize>>> = Vec::new();
    for c in cat.objects() {
        let mut out = Vec::new();
        let mut t = vec![0usize; n];
        fn rec(
            d: &SetPresheafDiagram,
            c: ObjId,
            k: usize,
            t: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) {
            if k == t.len() {
                out.push(t.clone());
                return;
            }
            for x in 0..d.nodes[k].card(c) {
                t[k] = x;
                let ok = d.edges.iter().all(|(a, b, m)| {
                    let (a, b) = (*a, *b);
                    a.max(b) != k || m.apply(c, t[a]) == t[b]
                });
                if ok {
                    rec(d, c, k + 1, t, out);
                }
            }
        }
        rec(d, c, 0, &mut t, &mut out);
        tuples.push(out);
    }
    let index: Vec<HashMap<Vec<usize>, usize>> = tuples
        .iter()
        .map(|ts| ts.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect())
        .collect();
    let values = cat
        .objects()
        .map(|c| {
            tuples[c.0]
                .iter()
                .map(|t| {
                    let parts: Vec<String> = t
                        .iter()
                        .enumerate()
                        .map(|(j, &x)| d.nodes[j].label(c, x))
                        .collect();
                    format!("({})", parts.join(","))
                })
                .collect()
        })
        .collect();
    let restrictions = cat
        .arrow_ids()
        .map(|f| {
            let (s, t) = (cat.source(f), cat.target(f));
            tuples[t.0]
                .iter()
                .map(|tup| {
                    let r: Vec<usize> = tup
                        .iter()
                        .enumerate()
                        .map(|(j, &x)| d.nodes[j].restrict(f, x))
                        .collect();
                    index[s.0][&r]
                })
                .collect()
        })
        .collect();
    let apex = SetPresheaf::new(cat.clone(), values, restrictions)?;
    let legs = (0..n)
        .map(|j| SetMorphism {
            components: cat
                .objects()
                .map(|c| tuples[c.0].iter().map(|t| t[j]).collect())
                .collect(),
        })
        .collect();
    Ok(PointwiseCone { apex, legs })
}

fn diagram_at(d: &ModPresheafDiagram, c: ObjId) -> ModDiagram {
    ModDiagram {
        nodes: d.nodes.iter().map(|p| p.value(c).clone()).collect(),
        edges: d
            .edges
            .iter()
            .map(|(a, b, m)| (*a, *b, m.component(c).clone()))
            .collect(),
    }
}

/// Objectwise module limit; restrictions are induced through the
/// inclusion into the direct sum.
pub fn mod_pointwise_limit(d: &ModPresheafDiagram) -> Result<PointwiseCone<ModPresheaf>> {
    check_edges(d.nodes.len(), d.edges.iter().map(|e| (e.0, e.1)))?;
    let cat = &d.base;
    let lims = cat
        .objects()
        .map(|c| limit(&d.ring, &diagram_at(d, c)))
        .collect::<Result<Vec<_>>>()?;
    let sums = cat
        .objects()
        .map(|c| direct_sum_many(&d.ring, &diagram_at(d, c).nodes))
        .collect::<Result<Vec<_>>>()?;
    let into_sum = |c: ObjId,
                    source: &FinModule,
                    legs: &dyn Fn(usize) -> Result<ModuleHom>|
     -> Result<ModuleHom> {
        let s = &sums[c.0];
        let mut acc = ModuleHom::zero(source, &s.sum);
        for j in 0..d.nodes.len() {
            acc = acc.add(&s.injections[j].compose(&legs(j)?)?)?;
        }
        Ok(acc)
    };
    let mut restrictions = Vec::new();
    for f in cat.arrow_ids() {
        let (s, t) = (cat.source(f), cat.target(f));
        let incl = into_sum(s, &lims[s.0].module, &|j| Ok(lims[s.0].legs[j].clone()))?;
        let moved = into_sum(s, &lims[t.0].module, &|j| {
            d.nodes[j].restriction(f).compose(&lims[t.0].legs[j])
        })?;
        let r = moved
            .lift_through(&incl)
            .ok_or_else(|| Error::Internal("limit restriction does not factor".into()))?;
        restrictions.push(r);
    }
    let values = lims.iter().map(|l| l.module.clone()).collect();
    let apex = ModPresheaf::new(cat.clone(), &d.ring, values, restrictions)?;
    let legs = (0..d.nodes.len())
        .map(|j| ModMorphism::new(lims.iter().map(|l| l.legs[j].clone()).collect()))
        .collect();
    Ok(PointwiseCone { apex, legs })
}

/// Objectwise module colimit; restrictions descend through the projection
/// from the direct sum.
pub fn mod_pointwise_colimit(d: &ModPresheafDiagram) -> Result<PointwiseCone<ModPresheaf>> {
    check_edges(d.nodes.len(), d.edges.iter().map(|e| (e.0, e.1)))?;
    let cat = &d.base;
    let colims = cat
        .objects()
        .map(|c| colimit(&d.ring, &diagram_at(d, c)))
        .collect::<Result<Vec<_>>>()?;
    let sums = cat
        .objects()
        .map(|c| direct_sum_many(&d.ring, &diagram_at(d, c).nodes))
        .collect::<Result<Vec<_>>>()?;
    let from_sum = |c: ObjId,
                    target: &FinModule,
                    legs: &dyn Fn(usize) -> Result<ModuleHom>|
     -> Result<ModuleHom> {
        let s = &sums[c.0];
        let mut acc = ModuleHom::zero(&s.sum, target);
        for j in 0..d.nodes.len() {
            acc = acc.add(&legs(j)?.compose(&s.projections[j])?)?;
        }
        Ok(acc)
    };
    let mut restrictions = Vec::new();
    for f in cat.arrow_ids() {
        let (s, t) = (cat.source(f), cat.target(f));
        let proj = from_sum(t, &colims[t.0].module, &|j| Ok(colims[t.0].legs[j].clone()))?;
        let moved = from_sum(t, &colims[s.0].module, &|j| {
            colims[s.0].legs[j].compose(d.nodes[j].restriction(f))
        })?;
        let r = moved
            .descend_through(&proj)
            .ok_or_else(|| Error::Internal("colimit restriction does not descend".into()))?;
        restrictions.push(r);
    }
    let values = colims.iter().map(|l| l.module.clone()).collect();
    let apex = ModPresheaf::new(cat.clone(), &d.ring, values, restrictions)?;
    let legs = (0..d.nodes.len())
        .map(|j| ModMorphism::new(colims.iter().map(|l| l.legs[j].clone()).collect()))
        .collect();
    Ok(PointwiseCone { apex, legs })
}
