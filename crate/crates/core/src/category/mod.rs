//! Finite categories stored as explicit composition tables.
//!
//! Objects and arrows are addressed by dense indices ([`ObjId`], [`ArrowId`]).
//! Arrow identity is by index (and hence by declared name): two parallel
//! arrows with identical composites are still distinct arrows.

mod functor;
mod limits;
mod props;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};

pub use functor::{full_subcategory, FunctorData, Variance};
pub use limits::{
    coequalizer, coproduct, equalizer, factor_through, factor_through_colimit, finite_colimit,
    finite_limit, initial_object, kernel_pair, product, pullback, terminal_object, verify_colimit,
    verify_limit, Cone, Diagram, DiagramEdge, Pullback,
};
pub use props::{
    generates, inverse, is_epi, is_epimorphic_family, is_iso, is_mono, separation_witness,
    ArrowFamily,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArrowId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub source: ObjId,
    pub target: ObjId,
}

/// A finite category with a total composition table.
#[derive(Debug)]
pub struct FinCategory {
    objects: Vec<String>,
    arrows: Vec<Arrow>,
    identities: Vec<ArrowId>,
    out_arrows: Vec<Vec<ArrowId>>,
    in_arrows: Vec<Vec<ArrowId>>,
    hom: Vec<Vec<Vec<ArrowId>>>,
    /// Position of each arrow in `out_arrows[source]`.
    out_pos: Vec<usize>,
    /// `table[f][k]` is `g o f` where `g = out_arrows[target(f)][k]`.
    table: Vec<Vec<ArrowId>>,
    opposite: OnceLock<Arc<FinCategory>>,
}

impl Clone for FinCategory {
    fn clone(&self) -> Self {
        FinCategory {
            objects: self.objects.clone(),
            arrows: self.arrows.clone(),
            identities: self.identities.clone(),
            out_arrows: self.out_arrows.clone(),
            in_arrows: self.in_arrows.clone(),
            hom: self.hom.clone(),
            out_pos: self.out_pos.clone(),
            table: self.table.clone(),
            opposite: OnceLock::new(),
        }
    }
}

impl PartialEq for FinCategory {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects
            && self.arrows == other.arrows
            && self.identities == other.identities
            && self.table == other.table
    }
}

impl Eq for FinCategory {}

impl FinCategory {
    /// Assembles a table from raw parts without checking the category laws.
    ///
    /// `compose(g, f)` is queried for every pair with `target(f) == source(g)`
    /// and must return `Some`; the returned arrow is stored as given, even if
    /// its endpoints are wrong, so that [`FinCategory::validate`] can report it.
    pub fn from_parts<F>(
        objects: Vec<String>,
        arrows: Vec<Arrow>,
        identities: Vec<ArrowId>,
        mut compose: F,
    ) -> Result<FinCategory>
    where
        F: FnMut(ArrowId, ArrowId) -> Option<ArrowId>,
    {
        let n = objects.len();
        if identities.len() != n {
            return Err(Error::Mismatch(format!(
                "{} identities for {} objects",
                identities.len(),
                n
            )));
        }
        for a in &arrows {
            if a.source.0 >= n || a.target.0 >= n {
                return Err(Error::UnknownObject(a.name.clone()));
            }
        }
        for &id in &identities {
            if id.0 >= arrows.len() {
                return Err(Error::UnknownArrow(format!("#{}", id.0)));
            }
        }
        let mut out_arrows = vec![Vec::new(); n];
        let mut in_arrows = vec![Vec::new(); n];
        let mut hom = vec![vec![Vec::new(); n]; n];
        let mut out_pos = vec![0; arrows.len()];
        for (i, a) in arrows.iter().enumerate() {
            out_pos[i] = out_arrows[a.source.0].len();
            out_arrows[a.source.0].push(ArrowId(i));
            in_arrows[a.target.0].push(ArrowId(i));
            hom[a.source.0][a.target.0].push(ArrowId(i));
        }
        let mut table = Vec::with_capacity(arrows.len());
        for (fi, f) in arrows.iter().enumerate() {
            let mut row = Vec::with_capacity(out_arrows[f.target.0].len());
            for &g in &out_arrows[f.target.0] {
                match compose(g, ArrowId(fi)) {
                    Some(h) if h.0 < arrows.len() => row.push(h),
                    Some(h) => return Err(Error::UnknownArrow(format!("#{}", h.0))),
                    None => {
                        return Err(Error::MissingComposite {
                            g: arrows[g.0].name.clone(),
                            f: f.name.clone(),
                        })
                    }
                }
            }
            table.push(row);
        }
        Ok(FinCategory {
            objects,
            arrows,
            identities,
            out_arrows,
            in_arrows,
            hom,
            out_pos,
            table,
            opposite: OnceLock::new(),
        })
    }

    /// Like [`FinCategory::from_parts`] but rejects tables that break the
    /// category laws.
    pub fn new<F>(
        objects: Vec<String>,
        arrows: Vec<Arrow>,
        identities: Vec<ArrowId>,
        compose: F,
    ) -> Result<FinCategory>
    where
        F: FnMut(ArrowId, ArrowId) -> Option<ArrowId>,
    {
        let cat = Self::from_parts(objects, arrows, identities, compose)?;
        let report = cat.validate();
        if report.is_valid() {
            Ok(cat)
        } else {
            Err(Error::InvalidCategory(report))
        }
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjId> + '_ {
        (0..self.objects.len()).map(ObjId)
    }

    pub fn arrow_ids(&self) -> impl Iterator<Item = ArrowId> + '_ {
        (0..self.arrows.len()).map(ArrowId)
    }

    pub fn object_name(&self, o: ObjId) -> &str {
        &self.objects[o.0]
    }

    pub fn arrow(&self, a: ArrowId) -> &Arrow {
        &self.arrows[a.0]
    }

    pub fn arrow_name(&self, a: ArrowId) -> &str {
        &self.arrows[a.0].name
    }

    pub fn source(&self, a: ArrowId) -> ObjId {
        self.arrows[a.0].source
    }

    pub fn target(&self, a: ArrowId) -> ObjId {
        self.arrows[a.0].target
    }

    pub fn identity(&self, o: ObjId) -> ArrowId {
        self.identities[o.0]
    }

    pub fn is_identity(&self, a: ArrowId) -> bool {
        self.identities[self.source(a).0] == a
    }

    pub fn object_by_name(&self, name: &str) -> Option<ObjId> {
        self.objects.iter().position(|o| o == name).map(ObjId)
    }

    pub fn arrow_by_name(&self, name: &str) -> Option<ArrowId> {
        self.arrows.iter().position(|a| a.name == name).map(ArrowId)
    }

    pub fn hom(&self, x: ObjId, y: ObjId) -> &[ArrowId] {
        &self.hom[x.0][y.0]
    }

    pub fn arrows_into(&self, c: ObjId) -> &[ArrowId] {
        &self.in_arrows[c.0]
    }

    pub fn arrows_out_of(&self, c: ObjId) -> &[ArrowId] {
        &self.out_arrows[c.0]
    }

    /// `g o f`, or `None` when `target(f) != source(g)`.
    pub fn compose(&self, g: ArrowId, f: ArrowId) -> Option<ArrowId> {
        if self.target(f) != self.source(g) {
            return None;
        }
        Some(self.table[f.0][self.out_pos[g.0]])
    }

    /// `g o f` for arrows already known to be composable.
    pub fn comp(&self, g: ArrowId, f: ArrowId) -> ArrowId {
        debug_assert_eq!(self.target(f), self.source(g));
        self.table[f.0][self.out_pos[g.0]]
    }

    /// The opposite category; arrows keep their indices and names.
    pub fn opposite(&self) -> Arc<FinCategory> {
        self.opposite
            .get_or_init(|| {
                let arrows = self
                    .arrows
                    .iter()
                    .map(|a| Arrow {
                        name: a.name.clone(),
                        source: a.target,
                        target: a.source,
                    })
                    .collect();
                let cat = FinCategory::from_parts(
                    self.objects.clone(),
                    arrows,
                    self.identities.clone(),
                    |g, f| self.compose(f, g),
                )
                .expect("opposite of a closed table is closed");
                Arc::new(cat)
            })
            .clone()
    }

    /// Checks typing, unit and associativity laws on every composable pair
    /// and triple.
    pub fn validate(&self) -> CategoryReport {
        let mut violations = Vec::new();
        let name = |a: ArrowId| self.arrow_name(a).to_string();
        for (o, &id) in self.identities.iter().enumerate() {
            let a = self.arrow(id);
            if a.source.0 != o || a.target.0 != o {
                violations.push(Violation::IdentityEndpoints { identity: name(id) });
            }
        }
        let mut well_typed = vec![Vec::new(); self.arrows.len()];
        for f in self.arrow_ids() {
            for &g in self.arrows_out_of(self.target(f)) {
                let h = self.comp(g, f);
                let typed = self.source(h) == self.source(f) && self.target(h) == self.target(g);
                well_typed[f.0].push(typed);
                let id_left = self.identity(self.target(f)) == g;
                let id_right = self.identity(self.source(f)) == f;
                if id_left && h != f {
                    violations.push(Violation::UnitLaw {
                        g: name(g),
                        f: name(f),
                        got: name(h),
                    });
                } else if id_right && h != g {
                    violations.push(Violation::UnitLaw {
                        g: name(g),
                        f: name(f),
                        got: name(h),
                    });
                } else if !typed {
                    violations.push(Violation::Typing {
                        g: name(g),
                        f: name(f),
                        got: name(h),
                    });
                }
            }
        }
        let typed = |g: ArrowId, f: ArrowId| well_typed[f.0][self.out_pos[g.0]];
        for f in self.arrow_ids() {
            for &g in self.arrows_out_of(self.target(f)) {
                if !typed(g, f) {
                    continue;
                }
                let gf = self.comp(g, f);
                for &h in self.arrows_out_of(self.target(g)) {
                    if !typed(h, g) {
                        continue;
                    }
                    let hg = self.comp(h, g);
                    if !typed(h, gf) || !typed(hg, f) {
                        continue;
                    }
                    let left = self.comp(hg, f);
                    let right = self.comp(h, gf);
                    if left != right {
                        violations.push(Violation::Associativity {
                            h: name(h),
                            g: name(g),
                            f: name(f),
                        });
                    }
                }
            }
        }
        CategoryReport { violations }
    }

    /// All composable pairs `(g, f)` in table order.
    pub fn composable_pairs(&self) -> impl Iterator<Item = (ArrowId, ArrowId)> + '_ {
        self.arrow_ids().flat_map(move |f| {
            self.arrows_out_of(self.target(f))
                .iter()
                .map(move |&g| (g, f))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    IdentityEndpoints { identity: String },
    Typing { g: String, f: String, got: String },
    UnitLaw { g: String, f: String, got: String },
    Associativity { h: String, g: String, f: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::IdentityEndpoints { identity } => {
                write!(
                    fm,
                    "identity {identity} is not an endomorphism of its object"
                )
            }
            Violation::Typing { g, f, got } => {
                write!(fm, "{g} o {f} = {got} has the wrong source or target")
            }
            Violation::UnitLaw { g, f, got } => {
                write!(fm, "unit law fails: {g} o {f} = {got}")
            }
            Violation::Associativity { h, g, f } => {
                write!(fm, "associativity fails on ({h}, {g}, {f})")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CategoryReport {
    pub violations: Vec<Violation>,
}

impl CategoryReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for CategoryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Builds a category from named objects, arrows and composition equations.
///
/// Identities `id_X` are added automatically ahead of the declared arrows.
/// Composites with identities are filled in unless declared explicitly, and
/// an undeclared composite is derived when its hom-set has a single arrow.
#[derive(Clone, Debug, Default)]
pub struct CategoryBuilder {
    objects: Vec<String>,
    arrows: Vec<(String, String, String)>,
    equations: Vec<(String, String, String)>,
}

impl CategoryBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn object(mut self, name: impl Into<String>) -> Self {
        self.objects.push(name.into());
        self
    }

    pub fn objects<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.objects.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn arrow(
        mut self,
        name: impl Into<String>,
        source: impl Into<String>,
        target: impl Into<String>,
    ) -> Self {
        self.arrows
            .push((name.into(), source.into(), target.into()));
        self
    }

    /// Declares `g o f = h`.
    pub fn compose(
        mut self,
        g: impl Into<String>,
        f: impl Into<String>,
        h: impl Into<String>,
    ) -> Self {
        self.equations.push((g.into(), f.into(), h.into()));
        self
    }

    fn assemble(&self) -> Result<FinCategory> {
        let mut obj_index = HashMap::new();
        for (i, o) in self.objects.iter().enumerate() {
            if obj_index.insert(o.clone(), i).is_some() {
                return Err(Error::Duplicate(o.clone()));
            }
        }
        let mut arrows = Vec::new();
        let mut identities = Vec::new();
        for (i, o) in self.objects.iter().enumerate() {
            identities.push(ArrowId(arrows.len()));
            arrows.push(Arrow {
                name: format!("id_{o}"),
                source: ObjId(i),
                target: ObjId(i),
            });
        }
        for (name, s, t) in &self.arrows {
            let source = *obj_index
                .get(s)
                .ok_or_else(|| Error::UnknownObject(s.clone()))?;
            let target = *obj_index
                .get(t)
                .ok_or_else(|| Error::UnknownObject(t.clone()))?;
            arrows.push(Arrow {
                name: name.clone(),
                source: ObjId(source),
                target: ObjId(target),
            });
        }
        let mut arrow_index = HashMap::new();
        for (i, a) in arrows.iter().enumerate() {
            if arrow_index.insert(a.name.clone(), i).is_some() {
                return Err(Error::Duplicate(a.name.clone()));
            }
        }
        let lookup = |n: &String| {
            arrow_index
                .get(n)
                .copied()
                .map(ArrowId)
                .ok_or_else(|| Error::UnknownArrow(n.clone()))
        };
        let mut declared = HashMap::new();
        for (g, f, h) in &self.equations {
            let (g, f, h) = (lookup(g)?, lookup(f)?, lookup(h)?);
            if arrows[f.0].target != arrows[g.0].source {
                return Err(Error::NotComposable {
                    g: arrows[g.0].name.clone(),
                    f: arrows[f.0].name.clone(),
                });
            }
            declared.insert((g, f), h);
        }
        let n = self.objects.len();
        let mut hom = vec![vec![Vec::new(); n]; n];
        for (i, a) in arrows.iter().enumerate() {
            hom[a.source.0][a.target.0].push(ArrowId(i));
        }
        let ids = identities.clone();
        let arrows_ref = arrows.clone();
        FinCategory::from_parts(self.objects.clone(), arrows, identities, |g, f| {
            if let Some(&h) = declared.get(&(g, f)) {
                return Some(h);
            }
            let (gs, ft) = (arrows_ref[g.0].source, arrows_ref[f.0].target);
            debug_assert_eq!(gs, ft);
            if ids[gs.0] == g {
                return Some(f);
            }
            if ids[arrows_ref[f.0].source.0] == f {
                return Some(g);
            }
            let candidates = &hom[arrows_ref[f.0].source.0][arrows_ref[g.0].target.0];
            if candidates.len() == 1 {
                Some(candidates[0])
            } else {
                None
            }
        })
    }

    /// Builds without checking the laws; see [`FinCategory::validate`].
    pub fn build_unchecked(&self) -> Result<FinCategory> {
        self.assemble()
    }

    pub fn build(&self) -> Result<FinCategory> {
        let cat = self.assemble()?;
        let report = cat.validate();
        if report.is_valid() {
            Ok(cat)
        } else {
            Err(Error::InvalidCategory(report))
        }
    }
}

/// The poset category on `names` where `x <= y` iff `leq(x, y)`. The relation
/// is closed reflexively and transitively; the arrow `x -> y` is named `x_y`.
pub fn poset<F>(names: &[&str], mut leq: F) -> Result<FinCategory>
where
    F: FnMut(usize, usize) -> bool,
{
    let n = names.len();
    let mut rel = vec![vec![false; n]; n];
    for (i, row) in rel.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = i == j || leq(i, j);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if rel[i][k] && rel[k][j] {
                    rel[i][j] = true;
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && rel[i][j] && rel[j][i] {
                return Err(Error::Mismatch(format!(
                    "{} and {} are mutually below each other",
                    names[i], names[j]
                )));
            }
        }
    }
    let mut b = CategoryBuilder::new().objects(names.iter().copied());
    for i in 0..n {
        for j in 0..n {
            if i != j && rel[i][j] {
                b = b.arrow(format!("{}_{}", names[i], names[j]), names[i], names[j]);
            }
        }
    }
    b.build()
}

/// The one-object category of the cyclic group of order `n`, with arrows
/// `g0 = id_*, g1, ..., g{n-1}` composing by addition mod `n`.
pub fn cyclic_group(n: usize) -> Result<FinCategory> {
    assert!(n >= 1);
    let objects = vec!["*".to_string()];
    let mut arrows = vec![Arrow {
        name: "id_*".into(),
        source: ObjId(0),
        target: ObjId(0),
    }];
    for k in 1..n {
        arrows.push(Arrow {
            name: format!("g{k}"),
            source: ObjId(0),
            target: ObjId(0),
        });
    }
    FinCategory::new(objects, arrows, vec![ArrowId(0)], |g, f| {
        Some(ArrowId((g.0 + f.0) % n))
    })
}

/// The standard small fixtures.
pub mod fixtures {
    use super::*;

    /// Objects `U`, `V` and a single non-identity arrow `i: U -> V`.
    pub fn c2() -> FinCategory {
        CategoryBuilder::new()
            .objects(["U", "V"])
            .arrow("i", "U", "V")
            .build()
            .unwrap()
    }

    /// Two parallel arrows `a, b: V -> W` plus an object `U` with no arrows
    /// into `V`.
    pub fn parallel_pair() -> FinCategory {
        CategoryBuilder::new()
            .objects(["U", "V", "W"])
            .arrow("a", "V", "W")
            .arrow("b", "V", "W")
            .build()
            .unwrap()
    }

    /// The chain `W < U < V`.
    pub fn chain3() -> FinCategory {
        poset(&["W", "U", "V"], |i, j| i < j).unwrap()
    }
}
