//! Syntax tree of a site document. Spans are carried for diagnostics and
//! ignored by equality, so a printed and re-parsed document compares equal
//! to the original.

use std::fmt;

#[derive(Clone, Copy, Debug, Default)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    pub fn new(name: impl Into<String>) -> Self {
        Ident {
            name: name.into(),
            span: Span::default(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Document {
    pub decls: Vec<Decl>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decl {
    Category(CategoryDecl),
    Topology(TopologyDecl),
    Ring(RingDecl),
    Presheaf(PresheafDecl),
    Morphism(MorphismDecl),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CategoryDecl {
    pub name: Ident,
    pub objects: Vec<Ident>,
    pub arrows: Vec<ArrowDecl>,
    pub compose: Vec<ComposeEq>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrowDecl {
    pub name: Ident,
    pub source: Ident,
    pub target: Ident,
}

/// `g o f = h`: first `f`, then `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComposeEq {
    pub g: Ident,
    pub f: Ident,
    pub h: Ident,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopologyDecl {
    pub name: Ident,
    pub category: Ident,
    pub covers: Vec<CoverDecl>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverDecl {
    pub object: Ident,
    pub arrows: Vec<Ident>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingDecl {
    pub components: Vec<u64>,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    Set,
    Mod,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresheafDecl {
    pub name: Ident,
    pub flavor: Flavor,
    pub category: Option<Ident>,
    pub entries: Vec<Entry>,
    pub span: Span,
}

/// `F(X) = ...;`: a value when `X` is an object, a restriction when it is
/// an arrow; `m(X) = ...;` is a component of a morphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub owner: Ident,
    pub at: Ident,
    pub rhs: Rhs,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rhs {
    Elements(Vec<Ident>),
    /// Cyclic factors as `(order, ring component)`.
    Module(Vec<(u64, usize)>),
    Pairs(Vec<(Ident, Ident)>),
    Matrix(Vec<Vec<i64>>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismDecl {
    pub name: Ident,
    pub source: Ident,
    pub target: Ident,
    pub components: Vec<Entry>,
    pub span: Span,
}

impl Document {
    pub fn categories(&self) -> impl Iterator<Item = &CategoryDecl> {
        self.decls.iter().filter_map(|d| match d {
            Decl::Category(c) => Some(c),
            _ => None,
        })
    }

    pub fn topologies(&self) -> impl Iterator<Item = &TopologyDecl> {
        self.decls.iter().filter_map(|d| match d {
            Decl::Topology(t) => Some(t),
            _ => None,
        })
    }

    pub fn presheaves(&self) -> impl Iterator<Item = &PresheafDecl> {
        self.decls.iter().filter_map(|d| match d {
            Decl::Presheaf(p) => Some(p),
            _ => None,
        })
    }

    pub fn morphisms(&self) -> impl Iterator<Item = &MorphismDecl> {
        self.decls.iter().filter_map(|d| match d {
            Decl::Morphism(m) => Some(m),
            _ => None,
        })
    }
}
