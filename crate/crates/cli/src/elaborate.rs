//! Turns a parsed document into validated core objects. Every failure is
//! reported against the span of the declaration that caused it.

use std::collections::HashMap;
use std::sync::Arc;

use toposkit::category::{ArrowFamily, CategoryBuilder, Violation};
use toposkit::modules::{Factor, FinModule, FinRing, ModuleHom};
use toposkit::presheaf::{
    naturality_failure, validate_presheaf, ModMorphism, ModPresheaf, SetMorphism, SetPresheaf,
};
use toposkit::site::{generate_topology, validate_basis, Basis, GrothendieckTopology};
use toposkit::{ArrowId, Error, FinCategory, ObjId};

use crate::ast::*;
use crate::diag::{Diagnostic, Stage};

#[derive(Clone, Debug)]
pub struct NamedCategory {
    pub name: String,
    pub category: Arc<FinCategory>,
}

#[derive(Clone, Debug)]
pub struct NamedTopology {
    pub name: String,
    pub category: usize,
    pub basis: Basis,
    pub topology: GrothendieckTopology,
}

#[derive(Clone, Debug)]
pub enum PresheafValue {
    Set(SetPresheaf),
    Mod(ModPresheaf),
}

#[derive(Clone, Debug)]
pub struct NamedPresheaf {
    pub name: String,
    pub category: usize,
    pub value: PresheafValue,
}

#[derive(Clone, Debug)]
pub enum MorphismValue {
    Set(SetMorphism),
    Mod(ModMorphism),
}

#[derive(Clone, Debug)]
pub struct NamedMorphism {
    pub name: String,
    pub source: usize,
    pub target: usize,
    pub value: MorphismValue,
}

#[derive(Clone, Debug, Default)]
pub struct Elaborated {
    pub categories: Vec<NamedCategory>,
    pub topologies: Vec<NamedTopology>,
    pub ring: Option<FinRing>,
    pub presheaves: Vec<NamedPresheaf>,
    pub morphisms: Vec<NamedMorphism>,
}

impl Elaborated {
    /// The last topology declared on category `c`.
    pub fn topology_on(&self, c: usize) -> Option<&NamedTopology> {
        self.topologies.iter().rev().find(|t| t.category == c)
    }

    pub fn presheaf(&self, name: &str) -> Option<&NamedPresheaf> {
        self.presheaves.iter().find(|p| p.name == name)
    }

    pub fn morphism(&self, name: &str) -> Option<&NamedMorphism> {
        self.morphisms.iter().find(|m| m.name == name)
    }
}

type EResult<T> = Result<T, Diagnostic>;

fn resolution(span: Span, msg: impl Into<String>) -> Diagnostic {
    Diagnostic::new(Stage::Resolution, span, msg)
}

fn invalid(span: Span, msg: impl Into<String>) -> Diagnostic {
    Diagnostic::new(Stage::Validation, span, msg)
}

struct Elaborator {
    out: Elaborated,
    ring: Option<FinRing>,
    errors: Vec<Diagnostic>,
}

/// Elaborates declarations in order; each may refer only to earlier ones.
pub fn elaborate(doc: &Document) -> Result<Elaborated, Vec<Diagnostic>> {
    let mut e = Elaborator { out: Elaborated::default(), ring: None, errors: Vec::new() };
    for d in &doc.decls {
        let r = match d {
            Decl::Category(c) => e.category(c),
            Decl::Topology(t) => e.topology(t),
            Decl::Ring(r) => e.ring(r),
            Decl::Presheaf(p) => e.presheaf(p),
            Decl::Morphism(m) => e.morphism(m),
        };
        if let Err(diag) = r {
            e.errors.push(diag);
        }
    }
    if e.errors.is_empty() {
        Ok(e.out)
    } else {
        Err(e.errors)
    }
}

fn duplicates<'a>(names: impl Iterator<Item = &'a Ident>, what: &str) -> EResult<()> {
    let mut seen = HashMap::new();
    for n in names {
        if seen.insert(n.name.as_str(), ()).is_some() {
            return Err(resolution(n.span, format!("duplicate {what} `{}`", n.name)));
        }
    }
    Ok(())
}

impl Elaborator {
    fn find_category(&self, name: &Ident) -> EResult<usize> {
        self.out
            .categories
            .iter()
            .rposition(|c| c.name == name.name)
            .ok_or_else(|| resolution(name.span, format!("unknown category `{}`", name.name)))
    }

    fn category(&mut self, c: &CategoryDecl) -> EResult<()> {
        duplicates(c.objects.iter(), "object")?;
        duplicates(c.arrows.iter().map(|a| &a.name), "arrow")?;
        let objects: HashMap<&str, ()> = c.objects.iter().map(|o| (o.name.as_str(), ())).collect();
        let mut arrows: HashMap<String, (&str, &str)> = c
            .objects
            .iter()
            .map(|o| (format!("id_{}", o.name), (o.name.as_str(), o.name.as_str())))
            .collect();
        for a in &c.arrows {
            for end in [&a.source, &a.target] {
                if !objects.contains_key(end.name.as_str()) {
                    return Err(resolution(end.span, format!("unknown object `{}`", end.name)));
                }
            }
            if arrows.insert(a.name.name.clone(), (&a.source.name, &a.target.name)).is_some() {
                return Err(resolution(a.name.span, format!("duplicate arrow `{}`", a.name.name)));
            }
        }
        for eq in &c.compose {
            for x in [&eq.g, &eq.f, &eq.h] {
                if !arrows.contains_key(&x.name) {
                    return Err(resolution(x.span, format!("unknown arrow `{}`", x.name)));
                }
            }
            let (g, f, h) = (arrows[&eq.g.name], arrows[&eq.f.name], arrows[&eq.h.name]);
            if f.1 != g.0 {
                return Err(invalid(eq.g.span, format!("{} o {} is not composable", eq.g.name, eq.f.name)));
            }
            if h != (f.0, g.1) {
                return Err(invalid(
                    eq.h.span,
                    format!("{} is not an arrow {} -> {}", eq.h.name, f.0, g.1),
                ));
            }
        }
        let mut b = CategoryBuilder::new().objects(c.objects.iter().map(|o| o.name.clone()));
        for a in &c.arrows {
            b = b.arrow(&a.name.name, &a.source.name, &a.target.name);
        }
        for eq in &c.compose {
            b = b.compose(&eq.g.name, &eq.f.name, &eq.h.name);
        }
        let cat = b.build_unchecked().map_err(|err| invalid(c.span, err.to_string()))?;
        let report = cat.validate();
        if let Some(v) = report.violations.first() {
            let names: Vec<&str> = match v {
                Violation::IdentityEndpoints { identity } => vec![identity],
                Violation::Typing { g, f, got } | Violation::UnitLaw { g, f, got } => vec![g, f, got],
                Violation::Associativity { h, g, f } => vec![h, g, f],
            };
            let span = c
                .compose
                .iter()
                .find(|eq| [&eq.g, &eq.f, &eq.h].iter().any(|x| names.contains(&x.name.as_str())))
                .map(|eq| eq.g.span)
                .unwrap_or(c.span);
            return Err(invalid(span, format!("category {}: {report}", c.name.name)));
        }
        self.out.categories.push(NamedCategory { name: c.name.name.clone(), category: Arc::new(cat) });
        Ok(())
    }

    fn topology(&mut self, t: &TopologyDecl) -> EResult<()> {
        let ci = self.find_category(&t.category)?;
        let cat = self.out.categories[ci].category.clone();
        let mut families = Vec::new();
        for cover in &t.covers {
            let c = object(&cat, &cover.object)?;
            let mut arrows = Vec::new();
            for a in &cover.arrows {
                let f = arrow(&cat, a)?;
                if cat.target(f) != c {
                    return Err(invalid(a.span, format!("{} does not end at {}", a.name, cover.object.name)));
                }
                arrows.push(f);
            }
            families.push(ArrowFamily::new(&cat, c, arrows).map_err(|e| invalid(cover.object.span, e.to_string()))?);
        }
        let basis = Basis::new(cat.clone(), families).map_err(|e| invalid(t.span, e.to_string()))?;
        let report = validate_basis(&basis).map_err(|e| invalid(t.span, e.to_string()))?;
        if !report.is_valid() {
            let clauses: Vec<String> = report.failed_clauses().iter().map(u8::to_string).collect();
            let parts: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
            return Err(invalid(
                t.span,
                format!("basis {} fails clause {}: {}", t.name.name, clauses.join(", "), parts.join("; ")),
            ));
        }
        let topology = generate_topology(&basis).map_err(|e| invalid(t.span, e.to_string()))?;
        self.out.topologies.push(NamedTopology { name: t.name.name.clone(), category: ci, basis, topology });
        Ok(())
    }

    fn ring(&mut self, r: &RingDecl) -> EResult<()> {
        let ring = FinRing::product(r.components.clone()).map_err(|e| invalid(r.span, e.to_string()))?;
        self.ring = Some(ring.clone());
        self.out.ring = Some(ring);
        Ok(())
    }

    fn presheaf(&mut self, p: &PresheafDecl) -> EResult<()> {
        if self.out.presheaf(&p.name.name).is_some() {
            return Err(resolution(p.name.span, format!("duplicate presheaf `{}`", p.name.name)));
        }
        let ci = match &p.category {
            Some(c) => self.find_category(c)?,
            None => self
                .out
                .categories
                .len()
                .checked_sub(1)
                .ok_or_else(|| resolution(p.span, "no category declared before this presheaf"))?,
        };
        let cat = self.out.categories[ci].category.clone();
        for e in &p.entries {
            if e.owner.name != p.name.name {
                return Err(resolution(
                    e.owner.span,
                    format!("`{}` inside presheaf {}", e.owner.name, p.name.name),
                ));
            }
        }
        let value = match p.flavor {
            Flavor::Set => PresheafValue::Set(set_presheaf(&cat, p)?),
            Flavor::Mod => {
                let ring = self
                    .ring
                    .clone()
                    .ok_or_else(|| resolution(p.span, "no ring declared before this presheaf"))?;
                PresheafValue::Mod(mod_presheaf(&cat, &ring, p)?)
            }
        };
        self.out.presheaves.push(NamedPresheaf { name: p.name.name.clone(), category: ci, value });
        Ok(())
    }

    fn morphism(&mut self, m: &MorphismDecl) -> EResult<()> {
        if self.out.morphism(&m.name.name).is_some() {
            return Err(resolution(m.name.span, format!("duplicate morphism `{}`", m.name.name)));
        }
        let find = |x: &Ident| {
            self.out
                .presheaves
                .iter()
                .position(|p| p.name == x.name)
                .ok_or_else(|| resolution(x.span, format!("unknown presheaf `{}`", x.name)))
        };
        let (si, ti) = (find(&m.source)?, find(&m.target)?);
        let (src, tgt) = (&self.out.presheaves[si], &self.out.presheaves[ti]);
        if src.category != tgt.category {
            return Err(invalid(m.span, "source and target live on different categories"));
        }
        let cat = self.out.categories[src.category].category.clone();
        let mut at: Vec<Option<&Entry>> = vec![None; cat.num_objects()];
        for e in &m.components {
            if e.owner.name != m.name.name {
                return Err(resolution(e.owner.span, format!("`{}` inside morphism {}", e.owner.name, m.name.name)));
            }
            let c = object(&cat, &e.at)?;
            if at[c.0].replace(e).is_some() {
                return Err(invalid(e.at.span, format!("second component at {}", e.at.name)));
            }
        }
        let missing = |c: ObjId| invalid(m.span, format!("no component at {}", cat.object_name(c)));
        let value = match (&src.value, &tgt.value) {
            (PresheafValue::Set(f), PresheafValue::Set(g)) => {
                let mut components = Vec::new();
                for c in cat.objects() {
                    let e = at[c.0].ok_or_else(|| missing(c))?;
                    components.push(pairs_map(&e.rhs, &e.at, f.values(c), g.values(c))?);
                }
                let mm = SetMorphism { components };
                if let Some(a) = naturality_failure(&mm, f, g) {
                    return Err(invalid(m.span, format!("{} is not natural at {a}", m.name.name)));
                }
                MorphismValue::Set(mm)
            }
            (PresheafValue::Mod(f), PresheafValue::Mod(g)) => {
                let mut components = Vec::new();
                for c in cat.objects() {
                    let e = at[c.0].ok_or_else(|| missing(c))?;
                    components.push(matrix_map(&e.rhs, &e.at, f.value(c), g.value(c))?);
                }
                let mm = ModMorphism::new(components);
                if let Some(a) = naturality_failure(&mm, f, g) {
                    return Err(invalid(m.span, format!("{} is not natural at {a}", m.name.name)));
                }
                MorphismValue::Mod(mm)
            }
            _ => return Err(invalid(m.span, "source and target have different flavors")),
        };
        self.out.morphisms.push(NamedMorphism { name: m.name.name.clone(), source: si, target: ti, value });
        Ok(())
    }
}

fn object(cat: &FinCategory, x: &Ident) -> EResult<ObjId> {
    cat.object_by_name(&x.name)
        .ok_or_else(|| resolution(x.span, format!("unknown object `{}`", x.name)))
}

fn arrow(cat: &FinCategory, x: &Ident) -> EResult<ArrowId> {
    cat.arrow_by_name(&x.name)
        .ok_or_else(|| resolution(x.span, format!("unknown arrow `{}`", x.name)))
}

/// Splits entries into values (at objects) and restrictions (at arrows).
fn split<'a>(cat: &FinCategory, p: &'a PresheafDecl) -> EResult<(Vec<Option<&'a Entry>>, Vec<Option<&'a Entry>>)> {
    let mut values = vec![None; cat.num_objects()];
    let mut maps = vec![None; cat.num_arrows()];
    for e in &p.entries {
        if let Some(c) = cat.object_by_name(&e.at.name) {
            if values[c.0].replace(e).is_some() {
                return Err(invalid(e.at.span, format!("second value for {}", e.at.name)));
            }
        } else if let Some(f) = cat.arrow_by_name(&e.at.name) {
            if maps[f.0].replace(e).is_some() {
                return Err(invalid(e.at.span, format!("second restriction along {}", e.at.name)));
            }
        } else {
            return Err(resolution(e.at.span, format!("`{}` is neither an object nor an arrow", e.at.name)));
        }
    }
    for c in cat.objects() {
        if values[c.0].is_none() {
            return Err(invalid(p.span, format!("{} has no value at {}", p.name.name, cat.object_name(c))));
        }
    }
    Ok((values, maps))
}

/// Fills undeclared restrictions: identities, then composites of declared
/// ones, until nothing changes.
fn complete<T: Clone>(
    cat: &FinCategory,
    maps: &mut [Option<T>],
    identity: impl Fn(ObjId) -> T,
    compose: impl Fn(&T, &T) -> EResult<T>,
) -> EResult<Option<ArrowId>> {
    for c in cat.objects() {
        let id = cat.identity(c);
        if maps[id.0].is_none() {
            maps[id.0] = Some(identity(c));
        }
    }
    loop {
        let mut progress = false;
        for (g, f) in cat.composable_pairs() {
            let h = cat.comp(g, f);
            if maps[h.0].is_none() {
                if let (Some(mg), Some(mf)) = (&maps[g.0], &maps[f.0]) {
                    // F(g o f) = F(f) o F(g)
                    maps[h.0] = Some(compose(mg, mf)?);
                    progress = true;
                }
            }
        }
        if !progress {
            break;
        }
    }
    Ok(cat.arrow_ids().find(|f| maps[f.0].is_none()))
}

fn element_names(rhs: &Rhs, at: &Ident) -> EResult<Vec<String>> {
    match rhs {
        Rhs::Elements(xs) => {
            duplicates(xs.iter(), "element")?;
            Ok(xs.iter().map(|x| x.name.clone()).collect())
        }
        _ => Err(invalid(at.span, format!("value at {} must be a set of elements", at.name))),
    }
}

/// A total map `from -> to` written as `{ x -> y, ... }`.
fn pairs_map(rhs: &Rhs, at: &Ident, from: &[String], to: &[String]) -> EResult<Vec<usize>> {
    let pairs: &[(Ident, Ident)] = match rhs {
        Rhs::Pairs(ps) => ps,
        Rhs::Elements(xs) if xs.is_empty() => &[],
        _ => return Err(invalid(at.span, format!("map at {} must be written {{ x -> y, ... }}", at.name))),
    };
    let mut map: Vec<Option<usize>> = vec![None; from.len()];
    for (a, b) in pairs {
        let x = from
            .iter()
            .position(|s| *s == a.name)
            .ok_or_else(|| invalid(a.span, format!("`{}` is not in the domain {{{}}}", a.name, from.join(", "))))?;
        let y = to
            .iter()
            .position(|s| *s == b.name)
            .ok_or_else(|| invalid(b.span, format!("`{}` is not in the codomain {{{}}}", b.name, to.join(", "))))?;
        if map[x].replace(y).is_some() {
            return Err(invalid(a.span, format!("`{}` is mapped twice", a.name)));
        }
    }
    map.iter()
        .enumerate()
        .map(|(x, y)| y.ok_or_else(|| invalid(at.span, format!("`{}` has no image under {}", from[x], at.name))))
        .collect()
}

fn matrix_map(rhs: &Rhs, at: &Ident, from: &FinModule, to: &FinModule) -> EResult<ModuleHom> {
    match rhs {
        Rhs::Matrix(rows) => {
            // an empty matrix stands for any map into the zero module
            let rows = if rows.is_empty() { vec![Vec::new(); to.rank()] } else { rows.clone() };
            let rows = rows
                .into_iter()
                .map(|r| if r.is_empty() { vec![0; from.rank()] } else { r })
                .collect();
            ModuleHom::new(from, to, rows).map_err(|e| invalid(at.span, format!("map at {}: {e}", at.name)))
        }
        _ => Err(invalid(at.span, format!("map at {} must be a matrix", at.name))),
    }
}

fn set_presheaf(cat: &Arc<FinCategory>, p: &PresheafDecl) -> EResult<SetPresheaf> {
    let (values, maps) = split(cat, p)?;
    let values: Vec<Vec<String>> = values
        .iter()
        .map(|e| {
            let e = e.expect("checked");
            element_names(&e.rhs, &e.at)
        })
        .collect::<EResult<_>>()?;
    let mut tables: Vec<Option<Vec<usize>>> = Vec::new();
    for f in cat.arrow_ids() {
        let (d, c) = (cat.source(f), cat.target(f));
        tables.push(match maps[f.0] {
            // F(f): F(C) -> F(D) for f: D -> C
            Some(e) => Some(pairs_map(&e.rhs, &e.at, &values[c.0], &values[d.0])?),
            // the empty map is the only one out of an empty set
            None if values[c.0].is_empty() => Some(Vec::new()),
            None => None,
        });
    }
    let missing = complete(
        cat,
        &mut tables,
        |c| (0..values[c.0].len()).collect(),
        |mg, mf| Ok(mg.iter().map(|&x| mf[x]).collect()),
    )?;
    if let Some(f) = missing {
        return Err(invalid(p.span, format!("{} has no restriction along {}", p.name.name, cat.arrow_name(f))));
    }
    let tables = tables.into_iter().map(|t| t.expect("complete")).collect();
    let f = SetPresheaf::from_parts(cat.clone(), values, tables).map_err(|e| invalid(p.span, e.to_string()))?;
    check_functorial(&f, p)?;
    Ok(f)
}

fn mod_presheaf(cat: &Arc<FinCategory>, ring: &FinRing, p: &PresheafDecl) -> EResult<ModPresheaf> {
    let (values, maps) = split(cat, p)?;
    let mut modules = Vec::new();
    for e in values {
        let e = e.expect("checked");
        let Rhs::Module(factors) = &e.rhs else {
            return Err(invalid(e.at.span, format!("value at {} must be a module", e.at.name)));
        };
        let factors = factors.iter().map(|&(order, component)| Factor { component, order }).collect();
        modules.push(FinModule::with_factors(ring, factors).map_err(|err| invalid(e.at.span, err.to_string()))?);
    }
    let mut homs: Vec<Option<ModuleHom>> = Vec::new();
    for f in cat.arrow_ids() {
        let (d, c) = (cat.source(f), cat.target(f));
        homs.push(match maps[f.0] {
            Some(e) => Some(matrix_map(&e.rhs, &e.at, &modules[c.0], &modules[d.0])?),
            None if modules[c.0].is_zero() || modules[d.0].is_zero() => {
                Some(ModuleHom::zero(&modules[c.0], &modules[d.0]))
            }
            None => None,
        });
    }
    let missing = complete(
        cat,
        &mut homs,
        |c| ModuleHom::identity(&modules[c.0]),
        |mg, mf| mf.compose(mg).map_err(|e| invalid(p.span, e.to_string())),
    )?;
    if let Some(f) = missing {
        return Err(invalid(p.span, format!("{} has no restriction along {}", p.name.name, cat.arrow_name(f))));
    }
    let homs = homs.into_iter().map(|h| h.expect("complete")).collect();
    let f = ModPresheaf::from_parts(cat.clone(), ring, modules, homs).map_err(|e| match e {
        Error::TooLarge(_) => invalid(p.span, format!("{}: {e}", p.name.name)),
        _ => invalid(p.span, e.to_string()),
    })?;
    check_functorial(&f, p)?;
    Ok(f)
}

fn check_functorial<P: toposkit::presheaf::Presheaf>(f: &P, p: &PresheafDecl) -> EResult<()> {
    let violations = validate_presheaf(f);
    if let Some(v) = violations.first() {
        return Err(invalid(p.span, format!("{} is not functorial: {v}", p.name.name)));
    }
    Ok(())
}
