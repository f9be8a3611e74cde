//! Declarations describing core objects, for writing documents back out.

use toposkit::presheaf::{ModPresheaf, Presheaf, SetPresheaf};
use toposkit::FinCategory;

use crate::ast::*;

/// Objects, non-identity arrows and every composite of two non-identity
/// arrows.
pub fn category_decl(name: &str, cat: &FinCategory) -> CategoryDecl {
    let plain = |f| !cat.is_identity(f);
    let arrows = cat
        .arrow_ids()
        .filter(|&f| plain(f))
        .map(|f| ArrowDecl {
            name: Ident::new(cat.arrow_name(f)),
            source: Ident::new(cat.object_name(cat.source(f))),
            target: Ident::new(cat.object_name(cat.target(f))),
        })
        .collect();
    let compose = cat
        .composable_pairs()
        .filter(|&(g, f)| plain(g) && plain(f))
        .map(|(g, f)| ComposeEq {
            g: Ident::new(cat.arrow_name(g)),
            f: Ident::new(cat.arrow_name(f)),
            h: Ident::new(cat.arrow_name(cat.comp(g, f))),
        })
        .collect();
    CategoryDecl {
        name: Ident::new(name),
        objects: cat.objects().map(|c| Ident::new(cat.object_name(c))).collect(),
        arrows,
        compose,
        span: Span::default(),
    }
}

pub fn set_presheaf_decl(name: &str, cat_name: &Ident, f: &SetPresheaf) -> PresheafDecl {
    let cat = f.base();
    let owner = Ident::new(name);
    let mut entries: Vec<Entry> = cat
        .objects()
        .map(|c| Entry {
            owner: owner.clone(),
            at: Ident::new(cat.object_name(c)),
            rhs: Rhs::Elements(f.values(c).iter().map(Ident::new).collect()),
        })
        .collect();
    for a in cat.arrow_ids().filter(|&a| !cat.is_identity(a)) {
        let (d, c) = (cat.source(a), cat.target(a));
        let pairs = (0..f.card(c))
            .map(|x| (Ident::new(f.values(c)[x].clone()), Ident::new(f.values(d)[f.restrict(a, x)].clone())))
            .collect();
        // `{}` reads back as an empty element list
        let rhs = if f.card(c) == 0 { Rhs::Elements(Vec::new()) } else { Rhs::Pairs(pairs) };
        entries.push(Entry { owner: owner.clone(), at: Ident::new(cat.arrow_name(a)), rhs });
    }
    PresheafDecl {
        name: owner,
        flavor: Flavor::Set,
        category: Some(cat_name.clone()),
        entries,
        span: Span::default(),
    }
}

pub fn mod_presheaf_decl(name: &str, cat_name: &Ident, f: &ModPresheaf) -> PresheafDecl {
    let cat = f.base();
    let owner = Ident::new(name);
    let mut entries: Vec<Entry> = cat
        .objects()
        .map(|c| Entry {
            owner: owner.clone(),
            at: Ident::new(cat.object_name(c)),
            rhs: Rhs::Module(f.value(c).factors().iter().map(|x| (x.order, x.component)).collect()),
        })
        .collect();
    for a in cat.arrow_ids().filter(|&a| !cat.is_identity(a)) {
        let rows = f.restriction(a).matrix().iter().map(|r| r.iter().map(|&v| v as i64).collect()).collect();
        entries.push(Entry { owner: owner.clone(), at: Ident::new(cat.arrow_name(a)), rhs: Rhs::Matrix(rows) });
    }
    PresheafDecl {
        name: owner,
        flavor: Flavor::Mod,
        category: Some(cat_name.clone()),
        entries,
        span: Span::default(),
    }
}
