//! Finite modules over `Z/n` and finite products of such rings.
//!
//! A module is presented as a direct sum of cyclic factors `Z/d`, each tagged
//! with the ring component it lives over. Elements are coefficient tuples
//! with coordinate `j` in `[0, d_j)`. Homomorphisms are integer matrices with
//! one row per codomain factor.

mod enumerate;
mod ops;
pub mod smith;

use std::fmt;

use crate::error::{Error, Result};

pub use enumerate::{all_homs, modules_up_to, submodules};
pub use ops::{
    cokernel, colimit, direct_sum, direct_sum_many, find_isomorphism, hom_module, hom_preserves_limit,
    hom_turns_colimit_into_limit, image, kernel,
    limit, mod_coequalizer, mod_equalizer, mod_pullback, Biproduct, HomModule, ModDiagram,
    ModLimit, ModPullback, Presented,
};

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `Z/n_1 x ... x Z/n_k`; a single component is the cyclic ring `Z/n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinRing {
    components: Vec<u64>,
}

impl FinRing {
    pub fn cyclic(n: u64) -> Result<FinRing> {
        Self::product(vec![n])
    }

    pub fn product(components: Vec<u64>) -> Result<FinRing> {
        if components.is_empty() {
            return Err(Error::InvalidRing(
                "a ring needs at least one component".into(),
            ));
        }
        if let Some(&n) = components.iter().find(|&&n| n == 0) {
            return Err(Error::InvalidRing(format!("Z/{n} is not finite")));
        }
        Ok(FinRing { components })
    }

    /// Parses `Z/2` or `Z/2 x Z/4`.
    pub fn parse(text: &str) -> Result<FinRing> {
        let mut comps = Vec::new();
        for part in text.split('x') {
            let part = part.trim();
            let n = part
                .strip_prefix("Z/")
                .and_then(|n| n.trim().parse::<u64>().ok())
                .ok_or_else(|| Error::InvalidRing(format!("cannot read `{part}`")))?;
            comps.push(n);
        }
        Self::product(comps)
    }

    pub fn components(&self) -> &[u64] {
        &self.components
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn size(&self) -> u128 {
        self.components.iter().map(|&n| n as u128).product()
    }

    /// The ring as a module over itself.
    pub fn regular_module(&self) -> FinModule {
        FinModule {
            ring: self.clone(),
            factors: self
                .components
                .iter()
                .enumerate()
                .map(|(c, &n)| Factor {
                    component: c,
                    order: n,
                })
                .collect(),
        }
    }
}

impl fmt::Display for FinRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(|n| format!("Z/{n}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Factor {
    pub component: usize,
    pub order: u64,
}

pub type Element = Vec<u64>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinModule {
    ring: FinRing,
    factors: Vec<Factor>,
}

impl FinModule {
    /// A module over a cyclic ring from its list of cyclic orders.
    pub fn new(ring: &FinRing, orders: &[u64]) -> Result<FinModule> {
        if ring.num_components() != 1 {
            return Err(Error::InvalidRing(
                "order lists need a cyclic ring; use with_factors for products".into(),
            ));
        }
        Self::with_factors(
            ring,
            orders
                .iter()
                .map(|&order| Factor {
                    component: 0,
                    order,
                })
                .collect(),
        )
    }

    pub fn with_factors(ring: &FinRing, factors: Vec<Factor>) -> Result<FinModule> {
        for f in &factors {
            let exponent = *ring
                .components
                .get(f.component)
                .ok_or_else(|| Error::InvalidRing(format!("no component {}", f.component)))?;
            if f.order == 0 || exponent % f.order != 0 {
                return Err(Error::OrderDivisibility {
                    order: f.order,
                    exponent,
                });
            }
        }
        Ok(FinModule {
            ring: ring.clone(),
            factors,
        })
    }

    pub fn zero(ring: &FinRing) -> FinModule {
        FinModule {
            ring: ring.clone(),
            factors: Vec::new(),
        }
    }

    pub fn ring(&self) -> &FinRing {
        &self.ring
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn orders(&self) -> Vec<u64> {
        self.factors.iter().map(|f| f.order).collect()
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn is_zero(&self) -> bool {
        self.factors.iter().all(|f| f.order == 1)
    }

    pub fn size(&self) -> u128 {
        self.factors.iter().map(|f| f.order as u128).product()
    }

    /// Element count for enumeration; panics if it does not fit in memory.
    pub fn card(&self) -> usize {
        usize::try_from(self.size()).expect("module too large to enumerate")
    }

    pub fn zero_element(&self) -> Element {
        vec![0; self.rank()]
    }

    pub fn normalize(&self, x: &[i128]) -> Element {
        x.iter()
            .zip(&self.factors)
            .map(|(&v, f)| v.rem_euclid(f.order as i128) as u64)
            .collect()
    }

    pub fn add(&self, x: &[u64], y: &[u64]) -> Element {
        x.iter()
            .zip(y)
            .zip(&self.factors)
            .map(|((a, b), f)| (a + b) % f.order)
            .collect()
    }

    pub fn neg(&self, x: &[u64]) -> Element {
        x.iter()
            .zip(&self.factors)
            .map(|(a, f)| (f.order - a % f.order) % f.order)
            .collect()
    }

    pub fn sub(&self, x: &[u64], y: &[u64]) -> Element {
        self.add(x, &self.neg(y))
    }

    /// Scalar action; `r` has one entry per ring component.
    pub fn scale(&self, r: &[u64], x: &[u64]) -> Element {
        x.iter()
            .zip(&self.factors)
            .map(|(a, f)| ((r[f.component] as u128 * *a as u128) % f.order as u128) as u64)
            .collect()
    }

    /// Mixed-radix index, first coordinate most significant.
    pub fn encode(&self, x: &[u64]) -> usize {
        let mut idx = 0usize;
        for (a, f) in x.iter().zip(&self.factors) {
            idx = idx * f.order as usize + *a as usize;
        }
        idx
    }

    pub fn decode(&self, mut idx: usize) -> Element {
        let mut out = vec![0; self.rank()];
        for (k, f) in self.factors.iter().enumerate().rev() {
            out[k] = (idx % f.order as usize) as u64;
            idx /= f.order as usize;
        }
        out
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.card()).map(|i| self.decode(i))
    }

    pub fn label(&self, x: &[u64]) -> String {
        let parts: Vec<String> = x.iter().map(u64::to_string).collect();
        format!("({})", parts.join(","))
    }

    fn check_same_ring(&self, other: &FinModule) -> Result<()> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }
}

impl fmt::Display for FinModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = if self.ring.num_components() == 1 {
            self.factors
                .iter()
                .map(|x| format!("Z/{}", x.order))
                .collect()
        } else {
            self.factors
                .iter()
                .map(|x| format!("Z/{}[{}]", x.order, x.component))
                .collect()
        };
        write!(f, "{}", parts.join(" + "))
    }
}

/// An `R`-linear map; `matrix[i][j]` is the image of generator `j` in
/// codomain coordinate `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModuleHom {
    domain: FinModule,
    codomain: FinModule,
    matrix: Vec<Vec<u64>>,
}

impl ModuleHom {
    /// Validates shape, the congruence `d_j * a_ij = 0 (mod e_i)` and
    /// component compatibility. Entries are reduced into `[0, e_i)`.
    pub fn new(domain: &FinModule, codomain: &FinModule, matrix: Vec<Vec<i64>>) -> Result<Self> {
        domain.check_same_ring(codomain)?;
        let (rows, cols) = (codomain.rank(), domain.rank());
        if matrix.len() != rows || matrix.iter().any(|r| r.len() != cols) {
            return Err(Error::MatrixShape {
                rows: matrix.len(),
                cols: matrix.first().map_or(0, Vec::len),
                expected_rows: rows,
                expected_cols: cols,
            });
        }
        let mut out = vec![vec![0u64; cols]; rows];
        for i in 0..rows {
            let e = codomain.factors[i];
            for j in 0..cols {
                let d = domain.factors[j];
                let value = matrix[i][j];
                let reduced = (value as i128).rem_euclid(e.order as i128) as u64;
                if reduced != 0 && d.component != e.component {
                    return Err(Error::MatrixEntry {
                        row: i,
                        col: j,
                        value,
                        reason: "entry links factors over different ring components".into(),
                    });
                }
                if (d.order as u128 * reduced as u128) % e.order as u128 != 0 {
                    return Err(Error::MatrixEntry {
                        row: i,
                        col: j,
                        value,
                        reason: format!("{} * {} is not 0 mod {}", d.order, value, e.order),
                    });
                }
                out[i][j] = reduced;
            }
        }
        Ok(ModuleHom {
            domain: domain.clone(),
            codomain: codomain.clone(),
            matrix: out,
        })
    }

    pub(crate) fn from_reduced(
        domain: FinModule,
        codomain: FinModule,
        matrix: Vec<Vec<u64>>,
    ) -> Self {
        debug_assert_eq!(matrix.len(), codomain.rank());
        ModuleHom {
            domain,
            codomain,
            matrix,
        }
    }

    /// Builds a hom from the images of the domain generators (columns).
    pub fn from_columns(
        domain: &FinModule,
        codomain: &FinModule,
        columns: &[Element],
    ) -> Result<Self> {
        let matrix = (0..codomain.rank())
            .map(|i| columns.iter().map(|c| c[i] as i64).collect())
            .collect();
        Self::new(domain, codomain, matrix)
    }

    pub fn zero(domain: &FinModule, codomain: &FinModule) -> Self {
        ModuleHom::from_reduced(
            domain.clone(),
            codomain.clone(),
            vec![vec![0; domain.rank()]; codomain.rank()],
        )
    }

    pub fn identity(m: &FinModule) -> Self {
        let matrix = (0..m.rank())
            .map(|i| {
                (0..m.rank())
                    .map(|j| u64::from(i == j) % m.factors[i].order)
                    .collect()
            })
            .collect();
        ModuleHom::from_reduced(m.clone(), m.clone(), matrix)
    }

    pub fn domain(&self) -> &FinModule {
        &self.domain
    }

    pub fn codomain(&self) -> &FinModule {
        &self.codomain
    }

    pub fn matrix(&self) -> &[Vec<u64>] {
        &self.matrix
    }

    pub fn column(&self, j: usize) -> Element {
        self.matrix.iter().map(|row| row[j]).collect()
    }

    pub fn apply(&self, x: &[u64]) -> Element {
        self.matrix
            .iter()
            .zip(&self.codomain.factors)
            .map(|(row, f)| {
                let n = f.order as u128;
                (row.iter()
                    .zip(x)
                    .map(|(a, b)| (*a as u128 * *b as u128) % n)
                    .sum::<u128>()
                    % n) as u64
            })
            .collect()
    }

    /// `self o other`.
    pub fn compose(&self, other: &ModuleHom) -> Result<ModuleHom> {
        if other.codomain != self.domain {
            return Err(Error::Mismatch(
                "composite of non-composable module maps".into(),
            ));
        }
        let columns: Vec<Element> = (0..other.domain.rank())
            .map(|j| self.apply(&other.column(j)))
            .collect();
        let matrix = (0..self.codomain.rank())
            .map(|i| columns.iter().map(|c| c[i]).collect())
            .collect();
        Ok(ModuleHom::from_reduced(
            other.domain.clone(),
            self.codomain.clone(),
            matrix,
        ))
    }

    fn same_shape(&self, other: &ModuleHom) -> Result<()> {
        if self.domain != other.domain || self.codomain != other.codomain {
            return Err(Error::Mismatch("module maps are not parallel".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &ModuleHom) -> Result<ModuleHom> {
        self.same_shape(other)?;
        let matrix = self
            .matrix
            .iter()
            .zip(&other.matrix)
            .zip(&self.codomain.factors)
            .map(|((a, b), f)| a.iter().zip(b).map(|(x, y)| (x + y) % f.order).collect())
            .collect();
        Ok(ModuleHom::from_reduced(
            self.domain.clone(),
            self.codomain.clone(),
            matrix,
        ))
    }

    pub fn neg(&self) -> ModuleHom {
        let matrix = self
            .matrix
            .iter()
            .zip(&self.codomain.factors)
            .map(|(row, f)| row.iter().map(|x| (f.order - x) % f.order).collect())
            .collect();
        ModuleHom::from_reduced(self.domain.clone(), self.codomain.clone(), matrix)
    }

    pub fn sub(&self, other: &ModuleHom) -> Result<ModuleHom> {
        self.add(&other.neg())
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().all(|&x| x == 0)
    }

    /// Some `x` with `self(x) = y`.
    pub fn preimage(&self, y: &[u64]) -> Option<Element> {
        let (rows, cols) = (self.codomain.rank(), self.domain.rank());
        let mut a: smith::Mat = vec![vec![0; cols + rows]; rows];
        for i in 0..rows {
            for j in 0..cols {
                a[i][j] = self.matrix[i][j] as i128;
            }
            a[i][cols + i] = self.codomain.factors[i].order as i128;
        }
        let b: Vec<i128> = y.iter().map(|&v| v as i128).collect();
        let z = smith::integer_solve(&a, rows, cols + rows, &b)?;
        Some(self.domain.normalize(&z[..cols]))
    }

    pub fn is_injective(&self) -> bool {
        kernel(self).module.size() == 1
    }

    pub fn is_surjective(&self) -> bool {
        image(self).module.size() == self.codomain.size()
    }

    pub fn is_iso(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// The inverse of a bijective map.
    pub fn inverse(&self) -> Option<ModuleHom> {
        if !self.is_iso() {
            return None;
        }
        let columns: Vec<Element> = (0..self.codomain.rank())
            .map(|i| {
                let mut e = self.codomain.zero_element();
                e[i] = 1 % self.codomain.factors[i].order;
                self.preimage(&e).expect("surjective")
            })
            .collect();
        ModuleHom::from_columns(&self.codomain, &self.domain, &columns).ok()
    }

    /// The unique `psi` with `mono o psi = self`, when `self` lands in the
    /// image of the injective map `mono`.
    pub fn lift_through(&self, mono: &ModuleHom) -> Option<ModuleHom> {
        if mono.codomain != self.codomain {
            return None;
        }
        let columns: Option<Vec<Element>> = (0..self.domain.rank())
            .map(|j| mono.preimage(&self.column(j)))
            .collect();
        let psi = ModuleHom::from_columns(&self.domain, &mono.domain, &columns?).ok()?;
        (mono.compose(&psi).ok()? == *self).then_some(psi)
    }

    /// The unique `psi` with `psi o epi = self`, when `self` kills the kernel
    /// of the surjective map `epi`.
    pub fn descend_through(&self, epi: &ModuleHom) -> Option<ModuleHom> {
        if epi.domain != self.domain {
            return None;
        }
        let q = &epi.codomain;
        let columns: Option<Vec<Element>> = (0..q.rank())
            .map(|i| {
                let mut e = q.zero_element();
                e[i] = 1 % q.factors[i].order;
                epi.preimage(&e).map(|x| self.apply(&x))
            })
            .collect();
        let psi = ModuleHom::from_columns(q, &self.codomain, &columns?).ok()?;
        (psi.compose(epi).ok()? == *self).then_some(psi)
    }

    /// Re-verifies additivity and `R`-linearity on every element; for
    /// desk-scale modules only.
    pub fn check_linear_exhaustive(&self) -> bool {
        let dom = &self.domain;
        let cod = &self.codomain;
        let elems: Vec<Element> = dom.elements().collect();
        for x in &elems {
            for y in &elems {
                if self.apply(&dom.add(x, y)) != cod.add(&self.apply(x), &self.apply(y)) {
                    return false;
                }
            }
        }
        let scalars = ring_elements(dom.ring());
        elems.iter().all(|x| {
            scalars
                .iter()
                .all(|r| self.apply(&dom.scale(r, x)) == cod.scale(r, &self.apply(x)))
        })
    }
}

/// All ring elements, one entry per component.
pub fn ring_elements(ring: &FinRing) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for &n in ring.components() {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..n).map(move |k| {
                    let mut v = prefix.clone();
                    v.push(k);
                    v
                })
            })
            .collect();
    }
    out
}
