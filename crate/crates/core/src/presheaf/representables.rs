use std::sync::Arc;

use super::colimits::{set_pointwise_colimit, SetPresheafDiagram};
use super::elements::category_of_elements;
use super::yoneda::{free_module_on, yoneda_set};
use super::{
    is_iso, ModMorphism, ModPresheaf, Presheaf, PresheafMorphism, SetMorphism, SetPresheaf,
};
use crate::category::{ArrowId, FinCategory, ObjId};
use crate::error::{Error, Result};
use crate::modules::{
    cokernel, direct_sum_many, Element, FinModule, FinRing, ModuleHom, Presented,
};

/// A colimit presentation of a presheaf with its canonical comparison map.
#[derive(Clone, Debug)]
pub struct RepresentableColimit<P: Presheaf> {
    pub colimit: P,
    pub comparison: P::Morphism,
    pub is_iso: bool,
}

/// `colim (y o pi_F)` over the category of elements, computed as a
/// pointwise colimit of representables, and the map `[g at (C, p)] -> p . g`.
pub fn colimit_of_representables_set(f: &SetPresheaf) -> Result<RepresentableColimit<SetPresheaf>> {
    let cat = f.base();
    let el = category_of_elements(f)?;
    let reps: Vec<SetPresheaf> = cat
        .objects()
        .map(|c| yoneda_set(cat, c))
        .collect::<Result<_>>()?;
    let nodes: Vec<SetPresheaf> = el
        .elements
        .iter()
        .map(|&(c, _)| reps[c.0].clone())
        .collect();
    let mut edges = Vec::new();
    for a in el.category.arrow_ids() {
        if el.category.is_identity(a) {
            continue;
        }
        let (u, _) = el.arrows[a.0];
        let (from, to) = (el.category.source(a).0, el.category.target(a).0);
        let (c1, c) = (cat.source(u), cat.target(u));
        // y(u): Hom(-, C') -> Hom(-, C), g -> u o g
        let components = cat
            .objects()
            .map(|x| {
                cat.hom(x, c1)
                    .iter()
                    .map(|&g| position(cat.hom(x, c), cat.comp(u, g)))
                    .collect()
            })
            .collect();
        edges.push((from, to, SetMorphism { components }));
    }
    let cone = set_pointwise_colimit(&SetPresheafDiagram {
        base: cat.clone(),
        nodes,
        edges,
    })?;
    let colimit = cone.apex;
    let mut components: Vec<Vec<usize>> = cat
        .objects()
        .map(|x| vec![usize::MAX; colimit.card(x)])
        .collect();
    for (j, &(c, p)) in el.elements.iter().enumerate() {
        for x in cat.objects() {
            for (k, &g) in cat.hom(x, c).iter().enumerate() {
                let class = cone.legs[j].apply(x, k);
                let image = f.restrict(g, p);
                if components[x.0][class] == usize::MAX {
                    components[x.0][class] = image;
                } else if components[x.0][class] != image {
                    return Err(Error::Internal("comparison is not well defined".into()));
                }
            }
        }
    }
    let comparison = SetMorphism { components };
    let iso = is_iso(&comparison, &colimit, f);
    Ok(RepresentableColimit {
        colimit,
        comparison,
        is_iso: iso,
    })
}

fn position(list: &[ArrowId], a: ArrowId) -> usize {
    list.iter().position(|&b| b == a).expect("arrow in hom-set")
}

fn idempotents(ring: &FinRing) -> Vec<Element> {
    let k = ring.num_components();
    (0..k)
        .map(|j| (0..k).map(|i| u64::from(i == j)).collect())
        .collect()
}

/// Builds the map from a free module on `count` relations into `target`,
/// the relation `r` being the element `vectors[r]` of `target`, componentwise.
fn relation_map(ring: &FinRing, target: &FinModule, vectors: &[Vec<i128>]) -> Result<ModuleHom> {
    let k = ring.num_components();
    let src = free_module_on(ring, vectors.len());
    let mut matrix = vec![vec![0i64; src.rank()]; target.rank()];
    for (r, v) in vectors.iter().enumerate() {
        for (row, &x) in v.iter().enumerate() {
            let comp = target.factors()[row].component;
            matrix[row][r * k + comp] = x as i64;
        }
    }
    ModuleHom::new(&src, target, matrix)
}

/// The `R`-linear colimit over the category of elements: free modules on
/// hom-sets indexed by elements `(C, p)`, glued along arrows of the
/// category of elements and made additive and `R`-linear in `p`.
///
/// A plain colimit of free representables is not `F` (already on a point
/// it doubles `Z/2`); the linearity relations recover `F`.
pub fn linear_elements_colimit(f: &ModPresheaf) -> Result<RepresentableColimit<ModPresheaf>> {
    let cat = f.base();
    let ring = f.ring();
    let k = ring.num_components();
    let el = category_of_elements(f)?;
    let eps = idempotents(ring);
    // generators at X: (element index, g in Hom(X, C))
    let mut gens: Vec<Vec<(usize, ArrowId)>> = Vec::new();
    for x in cat.objects() {
        let mut g = Vec::new();
        for (e, &(c, _)) in el.elements.iter().enumerate() {
            g.extend(cat.hom(x, c).iter().map(|&a| (e, a)));
        }
        gens.push(g);
    }
    let gen_index = |x: ObjId, e: usize, a: ArrowId| {
        gens[x.0]
            .iter()
            .position(|&t| t == (e, a))
            .expect("generator")
    };
    let elem = |c: ObjId, p: usize| el.object_of(c, p).0;
    let mut presented = Vec::new();
    for x in cat.objects() {
        let g_mod = free_module_on(ring, gens[x.0].len());
        let size = g_mod.rank();
        let coord = |b: usize, j: usize| b * k + j;
        let mut rels: Vec<Vec<i128>> = Vec::new();
        // arrows of the category of elements
        for a in el.category.arrow_ids() {
            if el.category.is_identity(a) {
                continue;
            }
            let (u, p) = el.arrows[a.0];
            let (c1, c) = (cat.source(u), cat.target(u));
            let e_lo = elem(c1, f.restrict(u, p));
            let e_hi = elem(c, p);
            for &g in cat.hom(x, c1) {
                let mut v = vec![0i128; size];
                for j in 0..k {
                    v[coord(gen_index(x, e_lo, g), j)] += 1;
                    v[coord(gen_index(x, e_hi, cat.comp(u, g)), j)] -= 1;
                }
                rels.push(v);
            }
        }
        // additivity against generators, and the component idempotents
        for c in cat.objects() {
            let m = f.value(c);
            let units: Vec<Element> = (0..m.rank())
                .map(|i| {
                    let mut e = m.zero_element();
                    e[i] = 1 % m.factors()[i].order;
                    e
                })
                .collect();
            let zero = elem(c, 0);
            for &g in cat.hom(x, c) {
                let mut v = vec![0i128; size];
                for j in 0..k {
                    v[coord(gen_index(x, zero, g), j)] = 1;
                }
                rels.push(v);
            }
            for p in m.elements() {
                let ep = elem(c, m.encode(&p));
                for &g in cat.hom(x, c) {
                    for b in &units {
                        let sum = elem(c, m.encode(&m.add(&p, b)));
                        let eb = elem(c, m.encode(b));
                        let mut v = vec![0i128; size];
                        for j in 0..k {
                            v[coord(gen_index(x, sum, g), j)] += 1;
                            v[coord(gen_index(x, ep, g), j)] -= 1;
                            v[coord(gen_index(x, eb, g), j)] -= 1;
                        }
                        rels.push(v);
                    }
                    if k > 1 {
                        for (j, e) in eps.iter().enumerate() {
                            let scaled = elem(c, m.encode(&m.scale(e, &p)));
                            let mut v = vec![0i128; size];
                            for i in 0..k {
                                v[coord(gen_index(x, scaled, g), i)] += 1;
                            }
                            v[coord(gen_index(x, ep, g), j)] -= 1;
                            rels.push(v);
                        }
                    }
                }
            }
        }
        let reduced: Vec<Vec<i128>> = rels
            .into_iter()
            .map(|v| {
                v.iter()
                    .enumerate()
                    .map(|(row, &x)| x.rem_euclid(g_mod.factors()[row].order as i128))
                    .collect()
            })
            .collect();
        let rel = relation_map(ring, &g_mod, &reduced)?;
        presented.push((g_mod.clone(), cokernel(&rel)));
    }
    // comparison: generator (e=(C,p), g) in component j -> eps_j (p . g)
    let mut comparison = Vec::new();
    for x in cat.objects() {
        let (g_mod, q) = &presented[x.0];
        let fx = f.value(x);
        let mut columns = Vec::new();
        for &(e, g) in &gens[x.0] {
            let (c, p) = el.elements[e];
            let image = f.restriction(g).apply(&f.value(c).decode(p));
            for e in &eps {
                columns.push(fx.scale(e, &image));
            }
        }
        let onto = ModuleHom::from_columns(g_mod, fx, &columns)?;
        comparison.push(
            onto.descend_through(&q.map)
                .ok_or_else(|| Error::Internal("comparison does not descend".into()))?,
        );
    }
    let restrictions = restrictions_between(cat, ring, &presented, |h, x, y| {
        // generator (e, g) at X goes to (e, g o h) at Y
        let mut columns = Vec::new();
        let (gy, _) = &presented[y.0];
        for &(e, g) in &gens[x.0] {
            let b = gen_index(y, e, cat.comp(g, h));
            for j in 0..k {
                let mut v = gy.zero_element();
                v[b * k + j] = 1;
                columns.push(v);
            }
        }
        ModuleHom::from_columns(&presented[x.0].0, gy, &columns)
    })?;
    let values = presented.iter().map(|(_, q)| q.module.clone()).collect();
    let colimit = ModPresheaf::new(cat.clone(), ring, values, restrictions)?;
    let comparison = ModMorphism::new(comparison);
    let iso = comparison.components().iter().all(ModuleHom::is_iso);
    Ok(RepresentableColimit {
        colimit,
        comparison,
        is_iso: iso,
    })
}

/// Restrictions of a presheaf presented objectwise as quotients of
/// generator modules, from a generator-level map for each arrow.
fn restrictions_between<M>(
    cat: &Arc<FinCategory>,
    _ring: &FinRing,
    presented: &[(FinModule, Presented)],
    mut lift: M,
) -> Result<Vec<ModuleHom>>
where
    M: FnMut(ArrowId, ObjId, ObjId) -> Result<ModuleHom>,
{
    cat.arrow_ids()
        .map(|h| {
            let (y, x) = (cat.source(h), cat.target(h));
            let on_gens = lift(h, x, y)?;
            let through = presented[y.0].1.map.compose(&on_gens)?;
            through
                .descend_through(&presented[x.0].1.map)
                .ok_or_else(|| Error::Internal("restriction does not descend".into()))
        })
        .collect()
}

pub fn colimit_of_representables_mod(f: &ModPresheaf) -> Result<RepresentableColimit<ModPresheaf>> {
    linear_elements_colimit(f)
}

/// The coequalizer presentation of `F (x)_C y` at every object `X`:
/// generators `sum_{C, g: X -> C} F(C)`, relations
/// `sum_{u: C' -> C, g: X -> C'} F(C)`, with `theta` applying `F(u)` into the
/// `(C', g)` copy and `tau` landing in the `(C, u o g)` copy.
#[derive(Clone, Debug)]
pub struct TensorPresentation {
    pub generators: Vec<FinModule>,
    pub relations: Vec<FinModule>,
    pub theta: Vec<ModuleHom>,
    pub tau: Vec<ModuleHom>,
    pub phi: Vec<ModuleHom>,
    pub tensor: ModPresheaf,
    /// `[p at (C, g)] -> p . g`.
    pub comparison: ModMorphism,
}

/// The copies `(C, g: X -> C)` making up the generators at `X`, in order.
pub fn tensor_generator_keys(cat: &FinCategory, x: ObjId) -> Vec<(ObjId, ArrowId)> {
    cat.objects()
        .flat_map(|c| cat.hom(x, c).iter().map(move |&g| (c, g)))
        .collect()
}

pub fn tensor_with_yoneda(f: &ModPresheaf) -> Result<TensorPresentation> {
    let cat = f.base();
    let ring = f.ring();
    let gen_keys: Vec<Vec<(ObjId, ArrowId)>> = cat.objects().map(|x| tensor_generator_keys(cat, x)).collect();
    let mut generators = Vec::new();
    let mut relations = Vec::new();
    let mut theta = Vec::new();
    let mut tau = Vec::new();
    let mut presented = Vec::new();
    let mut sums = Vec::new();
    for x in cat.objects() {
        let keys = &gen_keys[x.0];
        let gsum = direct_sum_many(
            ring,
            &keys
                .iter()
                .map(|&(c, _)| f.value(c).clone())
                .collect::<Vec<_>>(),
        )?;
        let rel_keys: Vec<(ArrowId, ArrowId)> = cat
            .arrow_ids()
            .filter(|&u| !cat.is_identity(u))
            .flat_map(|u| cat.hom(x, cat.source(u)).iter().map(move |&g| (u, g)))
            .collect();
        let rsum = direct_sum_many(
            ring,
            &rel_keys
                .iter()
                .map(|&(u, _)| f.value(cat.target(u)).clone())
                .collect::<Vec<_>>(),
        )?;
        let key = |c: ObjId, g: ArrowId| keys.iter().position(|&t| t == (c, g)).expect("key");
        let mut th = ModuleHom::zero(&rsum.sum, &gsum.sum);
        let mut ta = ModuleHom::zero(&rsum.sum, &gsum.sum);
        for (r, &(u, g)) in rel_keys.iter().enumerate() {
            let (c1, c) = (cat.source(u), cat.target(u));
            let lo = gsum.injections[key(c1, g)]
                .compose(f.restriction(u))?
                .compose(&rsum.projections[r])?;
            let hi = gsum.injections[key(c, cat.comp(u, g))].compose(&rsum.projections[r])?;
            th = th.add(&lo)?;
            ta = ta.add(&hi)?;
        }
        let q = cokernel(&th.sub(&ta)?);
        generators.push(gsum.sum.clone());
        relations.push(rsum.sum.clone());
        theta.push(th);
        tau.push(ta);
        presented.push((gsum.sum.clone(), q));
        sums.push(gsum);
    }
    let mut comparison = Vec::new();
    for x in cat.objects() {
        let mut onto = ModuleHom::zero(&generators[x.0], f.value(x));
        for (n, &(_, g)) in gen_keys[x.0].iter().enumerate() {
            onto = onto.add(&f.restriction(g).compose(&sums[x.0].projections[n])?)?;
        }
        comparison.push(
            onto.descend_through(&presented[x.0].1.map)
                .ok_or_else(|| Error::Internal("comparison does not descend".into()))?,
        );
    }
    let restrictions = restrictions_between(cat, ring, &presented, |h, x, y| {
        let mut acc = ModuleHom::zero(&generators[x.0], &generators[y.0]);
        for (n, &(c, g)) in gen_keys[x.0].iter().enumerate() {
            let m = gen_keys[y.0]
                .iter()
                .position(|&t| t == (c, cat.comp(g, h)))
                .expect("key");
            acc = acc.add(&sums[y.0].injections[m].compose(&sums[x.0].projections[n])?)?;
        }
        Ok(acc)
    })?;
    let phi: Vec<ModuleHom> = presented.iter().map(|(_, q)| q.map.clone()).collect();
    let values = presented.iter().map(|(_, q)| q.module.clone()).collect();
    let tensor = ModPresheaf::new(cat.clone(), ring, values, restrictions)?;
    Ok(TensorPresentation {
        generators,
        relations,
        theta,
        tau,
        phi,
        tensor,
        comparison: ModMorphism::new(comparison),
    })
}
