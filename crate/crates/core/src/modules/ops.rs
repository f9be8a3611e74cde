use super::smith::{integer_kernel, smith, Mat};
use super::{gcd, Element, Factor, FinModule, ModuleHom};
use crate::error::{Error, Result};

/// A module together with a map presenting it: the inclusion of a kernel or
/// image, or the projection onto a cokernel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presented {
    pub module: FinModule,
    pub map: ModuleHom,
}

fn blocks(m: &FinModule) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); m.ring().num_components()];
    for (i, f) in m.factors().iter().enumerate() {
        out[f.component].push(i);
    }
    out
}

/// Cyclic presentation of the subgroup of `Z^m / diag(orders)` generated by
/// `gens`: returns the invariant factors (1s dropped) and a generator
/// vector for each.
fn present_subgroup(orders: &[u64], gens: &[Vec<i128>]) -> Vec<(u64, Vec<i128>)> {
    let m = orders.len();
    let r = gens.len();
    if m == 0 || r == 0 {
        return Vec::new();
    }
    let mut a: Mat = vec![vec![0; r + m]; m];
    for i in 0..m {
        for k in 0..r {
            a[i][k] = gens[k][i];
        }
        a[i][r + i] = -(orders[i] as i128);
    }
    let relations = integer_kernel(&a, m, r + m);
    let t = relations.len();
    let l: Mat = (0..r)
        .map(|k| relations.iter().map(|v| v[k]).collect())
        .collect();
    let s = smith(&l, r, t);
    assert_eq!(
        s.rank, r,
        "finite subgroup must have a full-rank relation lattice"
    );
    let mut out = Vec::new();
    for i in 0..r {
        let order = s.diag[i] as u64;
        if order == 1 {
            continue;
        }
        let coeffs: Vec<i128> = (0..r).map(|k| s.u_inv[k][i]).collect();
        let v: Vec<i128> = (0..m)
            .map(|row| {
                let x: i128 = (0..r).map(|k| gens[k][row] * coeffs[k]).sum();
                x.rem_euclid(orders[row] as i128)
            })
            .collect();
        out.push((order, v));
    }
    out
}

fn block_matrix(h: &ModuleHom, rows: &[usize], cols: &[usize]) -> Vec<Vec<i128>> {
    rows.iter()
        .map(|&i| cols.iter().map(|&j| h.matrix()[i][j] as i128).collect())
        .collect()
}

fn orders_at(m: &FinModule, idx: &[usize]) -> Vec<u64> {
    idx.iter().map(|&i| m.factors()[i].order).collect()
}

/// Assembles per-component generator data into a module and the map from it
/// into `ambient` (columns given in ambient coordinates).
fn assemble_sub(ambient: &FinModule, parts: Vec<(usize, Vec<(u64, Element)>)>) -> Presented {
    let mut factors = Vec::new();
    let mut columns = Vec::new();
    for (component, gens) in parts {
        for (order, col) in gens {
            factors.push(Factor { component, order });
            columns.push(col);
        }
    }
    let module = FinModule::with_factors(ambient.ring(), factors).expect("orders divide exponent");
    let map = ModuleHom::from_columns(&module, ambient, &columns).expect("valid inclusion");
    Presented { module, map }
}

fn embed(len: usize, idx: &[usize], v: &[i128]) -> Element {
    let mut out = vec![0u64; len];
    for (k, &i) in idx.iter().enumerate() {
        out[i] = v[k] as u64;
    }
    out
}

pub fn kernel(h: &ModuleHom) -> Presented {
    let (dom, cod) = (h.domain(), h.codomain());
    let (db, cb) = (blocks(dom), blocks(cod));
    let mut parts = Vec::new();
    for c in 0..db.len() {
        let (di, ci) = (&db[c], &cb[c]);
        let (m, n) = (di.len(), ci.len());
        if m == 0 {
            continue;
        }
        let d = orders_at(dom, di);
        let e = orders_at(cod, ci);
        let blk = block_matrix(h, ci, di);
        let mut a: Mat = vec![vec![0; m + n]; n];
        for i in 0..n {
            a[i][..m].copy_from_slice(&blk[i]);
            a[i][m + i] = -(e[i] as i128);
        }
        let gens: Vec<Vec<i128>> = integer_kernel(&a, n, m + n)
            .into_iter()
            .map(|v| v[..m].to_vec())
            .collect();
        let pres = present_subgroup(&d, &gens)
            .into_iter()
            .map(|(o, v)| (o, embed(dom.rank(), di, &v)))
            .collect();
        parts.push((c, pres));
    }
    assemble_sub(dom, parts)
}

pub fn image(h: &ModuleHom) -> Presented {
    let (dom, cod) = (h.domain(), h.codomain());
    let (db, cb) = (blocks(dom), blocks(cod));
    let mut parts = Vec::new();
    for c in 0..cb.len() {
        let (di, ci) = (&db[c], &cb[c]);
        if ci.is_empty() {
            continue;
        }
        let e = orders_at(cod, ci);
        let gens: Vec<Vec<i128>> = di
            .iter()
            .map(|&j| ci.iter().map(|&i| h.matrix()[i][j] as i128).collect())
            .collect();
        let pres = present_subgroup(&e, &gens)
            .into_iter()
            .map(|(o, v)| (o, embed(cod.rank(), ci, &v)))
            .collect();
        parts.push((c, pres));
    }
    assemble_sub(cod, parts)
}

pub fn cokernel(h: &ModuleHom) -> Presented {
    let (dom, cod) = (h.domain(), h.codomain());
    let (db, cb) = (blocks(dom), blocks(cod));
    let mut factors = Vec::new();
    let mut rows: Vec<Vec<u64>> = Vec::new();
    for c in 0..cb.len() {
        let (di, ci) = (&db[c], &cb[c]);
        let (m, n) = (di.len(), ci.len());
        if n == 0 {
            continue;
        }
        let e = orders_at(cod, ci);
        let blk = block_matrix(h, ci, di);
        let mut a: Mat = vec![vec![0; m + n]; n];
        for i in 0..n {
            a[i][..m].copy_from_slice(&blk[i]);
            a[i][m + i] = e[i] as i128;
        }
        let s = smith(&a, n, m + n);
        for i in 0..n {
            let order = s.diag[i] as u64;
            if order == 1 {
                continue;
            }
            factors.push(Factor {
                component: c,
                order,
            });
            let mut row = vec![0u64; cod.rank()];
            for (k, &j) in ci.iter().enumerate() {
                row[j] = s.u[i][k].rem_euclid(order as i128) as u64;
            }
            rows.push(row);
        }
    }
    let module = FinModule::with_factors(cod.ring(), factors).expect("orders divide exponent");
    let map = ModuleHom::from_reduced(cod.clone(), module.clone(), rows);
    Presented { module, map }
}

pub fn mod_equalizer(u: &ModuleHom, v: &ModuleHom) -> Result<Presented> {
    Ok(kernel(&u.sub(v)?))
}

pub fn mod_coequalizer(u: &ModuleHom, v: &ModuleHom) -> Result<Presented> {
    Ok(cokernel(&u.sub(v)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Biproduct {
    pub sum: FinModule,
    pub injections: Vec<ModuleHom>,
    pub projections: Vec<ModuleHom>,
}

pub fn direct_sum_many(ring: &super::FinRing, mods: &[FinModule]) -> Result<Biproduct> {
    let mut factors = Vec::new();
    for m in mods {
        if m.ring() != ring {
            return Err(Error::RingMismatch);
        }
        factors.extend_from_slice(m.factors());
    }
    let sum = FinModule::with_factors(ring, factors)?;
    let mut injections = Vec::new();
    let mut projections = Vec::new();
    let mut offset = 0;
    for m in mods {
        let inj: Vec<Vec<u64>> = (0..sum.rank())
            .map(|i| {
                (0..m.rank())
                    .map(|j| u64::from(i == offset + j) % sum.factors()[i].order)
                    .collect()
            })
            .collect();
        let proj: Vec<Vec<u64>> = (0..m.rank())
            .map(|i| {
                (0..sum.rank())
                    .map(|j| u64::from(j == offset + i) % m.factors()[i].order)
                    .collect()
            })
            .collect();
        injections.push(ModuleHom::from_reduced(m.clone(), sum.clone(), inj));
        projections.push(ModuleHom::from_reduced(sum.clone(), m.clone(), proj));
        offset += m.rank();
    }
    Ok(Biproduct {
        sum,
        injections,
        projections,
    })
}

pub fn direct_sum(m: &FinModule, n: &FinModule) -> Result<Biproduct> {
    if m.ring() != n.ring() {
        return Err(Error::RingMismatch);
    }
    direct_sum_many(m.ring(), &[m.clone(), n.clone()])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModPullback {
    pub module: FinModule,
    pub p1: ModuleHom,
    pub p2: ModuleHom,
}

/// Fiber product of `f: M -> P` and `g: N -> P`, as the kernel of
/// `(f, -g): M + N -> P`.
pub fn mod_pullback(f: &ModuleHom, g: &ModuleHom) -> Result<ModPullback> {
    if f.codomain() != g.codomain() {
        return Err(Error::Mismatch(
            "pullback of maps with different codomains".into(),
        ));
    }
    let bp = direct_sum(f.domain(), g.domain())?;
    let d = f
        .compose(&bp.projections[0])?
        .sub(&g.compose(&bp.projections[1])?)?;
    let k = kernel(&d);
    Ok(ModPullback {
        p1: bp.projections[0].compose(&k.map)?,
        p2: bp.projections[1].compose(&k.map)?,
        module: k.module,
    })
}

/// `Hom(M, N)` as a module: one cyclic factor per pair of factors with a
/// nontrivial common order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomModule {
    pub module: FinModule,
    pub source: FinModule,
    pub target: FinModule,
    /// `(row, col, step)` per generator: the generator has `step` at
    /// `(row, col)` and zeros elsewhere.
    entries: Vec<(usize, usize, u64)>,
}

impl HomModule {
    pub fn to_hom(&self, x: &[u64]) -> ModuleHom {
        let mut matrix = vec![vec![0u64; self.source.rank()]; self.target.rank()];
        for (k, &(i, j, step)) in self.entries.iter().enumerate() {
            let e = self.target.factors()[i].order;
            matrix[i][j] = (x[k] * step) % e;
        }
        ModuleHom::from_reduced(self.source.clone(), self.target.clone(), matrix)
    }

    pub fn from_hom(&self, h: &ModuleHom) -> Element {
        self.entries
            .iter()
            .map(|&(i, j, step)| h.matrix()[i][j] / step)
            .collect()
    }

    pub fn homs(&self) -> impl Iterator<Item = ModuleHom> + '_ {
        self.module.elements().map(|x| self.to_hom(&x))
    }
}

pub fn hom_module(m: &FinModule, n: &FinModule) -> Result<HomModule> {
    if m.ring() != n.ring() {
        return Err(Error::RingMismatch);
    }
    let mut factors = Vec::new();
    let mut entries = Vec::new();
    for (i, e) in n.factors().iter().enumerate() {
        for (j, d) in m.factors().iter().enumerate() {
            if d.component != e.component {
                continue;
            }
            let g = gcd(d.order, e.order);
            if g == 1 {
                continue;
            }
            factors.push(Factor {
                component: e.component,
                order: g,
            });
            entries.push((i, j, e.order / g));
        }
    }
    Ok(HomModule {
        module: FinModule::with_factors(m.ring(), factors)?,
        source: m.clone(),
        target: n.clone(),
        entries,
    })
}

/// A finite diagram of modules: nodes and maps between them.
#[derive(Clone, Debug, Default)]
pub struct ModDiagram {
    pub nodes: Vec<FinModule>,
    pub edges: Vec<(usize, usize, ModuleHom)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModLimit {
    pub module: FinModule,
    pub legs: Vec<ModuleHom>,
}

pub fn limit(ring: &super::FinRing, d: &ModDiagram) -> Result<ModLimit> {
    let src = direct_sum_many(ring, &d.nodes)?;
    let tgt_nodes: Vec<FinModule> = d
        .edges
        .iter()
        .map(|(_, to, _)| d.nodes[*to].clone())
        .collect();
    let tgt = direct_sum_many(ring, &tgt_nodes)?;
    let mut delta = ModuleHom::zero(&src.sum, &tgt.sum);
    for (k, (from, to, h)) in d.edges.iter().enumerate() {
        let along = tgt.injections[k].compose(&h.compose(&src.projections[*from])?)?;
        let stay = tgt.injections[k].compose(&src.projections[*to])?;
        delta = delta.add(&along)?.sub(&stay)?;
    }
    let k = kernel(&delta);
    let legs = src
        .projections
        .iter()
        .map(|p| p.compose(&k.map))
        .collect::<Result<Vec<_>>>()?;
    Ok(ModLimit {
        module: k.module,
        legs,
    })
}

pub fn colimit(ring: &super::FinRing, d: &ModDiagram) -> Result<ModLimit> {
    let tgt = direct_sum_many(ring, &d.nodes)?;
    let src_nodes: Vec<FinModule> = d
        .edges
        .iter()
        .map(|(from, _, _)| d.nodes[*from].clone())
        .collect();
    let src = direct_sum_many(ring, &src_nodes)?;
    let mut nabla = ModuleHom::zero(&src.sum, &tgt.sum);
    for (k, (from, to, h)) in d.edges.iter().enumerate() {
        let along = tgt.injections[*to]
            .compose(h)?
            .compose(&src.projections[k])?;
        let stay = tgt.injections[*from].compose(&src.projections[k])?;
        nabla = nabla.add(&along)?.sub(&stay)?;
    }
    let q = cokernel(&nabla);
    let legs = tgt
        .injections
        .iter()
        .map(|i| q.map.compose(i))
        .collect::<Result<Vec<_>>>()?;
    Ok(ModLimit {
        module: q.module,
        legs,
    })
}

/// An explicit isomorphism `M -> N`, if the modules are isomorphic.
pub fn find_isomorphism(m: &FinModule, n: &FinModule) -> Option<ModuleHom> {
    if m.ring() != n.ring() || m.size() != n.size() {
        return None;
    }
    let cm = cokernel(&ModuleHom::zero(&FinModule::zero(m.ring()), m));
    let cn = cokernel(&ModuleHom::zero(&FinModule::zero(n.ring()), n));
    if cm.module != cn.module {
        return None;
    }
    let back = cn.map.inverse()?;
    back.compose(&cm.map).ok()
}

/// Whether the canonical map `Hom(E, lim D) -> lim Hom(E, D)` is an
/// isomorphism.
pub fn hom_preserves_limit(e: &FinModule, d: &ModDiagram) -> Result<bool> {
    let ring = e.ring();
    let lim = limit(ring, d)?;
    let homs: Vec<HomModule> = d.nodes.iter().map(|n| hom_module(e, n)).collect::<Result<_>>()?;
    let edges = d
        .edges
        .iter()
        .map(|(from, to, h)| {
            let (a, b) = (&homs[*from], &homs[*to]);
            crate::presheaf::linear_map(&a.module, &b.module, |x| Ok(b.from_hom(&h.compose(&a.to_hom(x))?)))
                .map(|m| (*from, *to, m))
        })
        .collect::<Result<_>>()?;
    let hd = ModDiagram { nodes: homs.iter().map(|h| h.module.clone()).collect(), edges };
    compare(ring, &hom_module(e, &lim.module)?, &hd, |k, x| {
        Ok(homs[k].from_hom(&lim.legs[k].compose(x)?))
    })
}

/// Whether the canonical map `Hom(colim D, E) -> lim Hom(D, E)` is an
/// isomorphism; the arrows of the hom diagram are reversed.
pub fn hom_turns_colimit_into_limit(d: &ModDiagram, e: &FinModule) -> Result<bool> {
    let ring = e.ring();
    let colim = colimit(ring, d)?;
    let homs: Vec<HomModule> = d.nodes.iter().map(|n| hom_module(n, e)).collect::<Result<_>>()?;
    let edges = d
        .edges
        .iter()
        .map(|(from, to, h)| {
            let (a, b) = (&homs[*to], &homs[*from]);
            crate::presheaf::linear_map(&a.module, &b.module, |x| Ok(b.from_hom(&a.to_hom(x).compose(h)?)))
                .map(|m| (*to, *from, m))
        })
        .collect::<Result<_>>()?;
    let hd = ModDiagram { nodes: homs.iter().map(|h| h.module.clone()).collect(), edges };
    compare(ring, &hom_module(&colim.module, e)?, &hd, |k, x| {
        Ok(homs[k].from_hom(&x.compose(&colim.legs[k])?))
    })
}

/// The map from `source` into the limit of `hd` with components `leg`,
/// tested for bijectivity.
fn compare(
    ring: &super::FinRing,
    source: &HomModule,
    hd: &ModDiagram,
    mut leg: impl FnMut(usize, &ModuleHom) -> Result<Element>,
) -> Result<bool> {
    let target = limit(ring, hd)?;
    let sum = direct_sum_many(ring, &hd.nodes)?;
    let into_sum = crate::presheaf::linear_map(&source.module, &sum.sum, |x| {
        let h = source.to_hom(x);
        let mut out = sum.sum.zero_element();
        for k in 0..hd.nodes.len() {
            out = sum.sum.add(&out, &sum.injections[k].apply(&leg(k, &h)?));
        }
        Ok(out)
    })?;
    let mut inclusion = ModuleHom::zero(&target.module, &sum.sum);
    for (k, l) in target.legs.iter().enumerate() {
        inclusion = inclusion.add(&sum.injections[k].compose(l)?)?;
    }
    Ok(into_sum.lift_through(&inclusion).is_some_and(|m| m.is_iso()))
}
