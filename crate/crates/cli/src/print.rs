use std::fmt::Write;

use crate::ast::*;
use crate::lexer::{is_ident_char, is_ident_start};

/// Canonical source text of a document.
pub fn print(doc: &Document) -> String {
    let mut out = String::new();
    for (k, d) in doc.decls.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        match d {
            Decl::Category(c) => category(&mut out, c),
            Decl::Topology(t) => topology(&mut out, t),
            Decl::Ring(r) => {
                let _ = writeln!(out, "ring {};", ring(&r.components));
            }
            Decl::Presheaf(p) => presheaf(&mut out, p),
            Decl::Morphism(m) => morphism(&mut out, m),
        }
    }
    out
}

pub fn ring(components: &[u64]) -> String {
    components.iter().map(|n| format!("Z/{n}")).collect::<Vec<_>>().join(" x ")
}

/// A name, quoted unless it lexes as an identifier.
fn name(s: &str) -> String {
    let plain = s.chars().next().is_some_and(is_ident_start) && s.chars().all(is_ident_char);
    if plain {
        s.to_string()
    } else {
        let escaped: String = s
            .chars()
            .flat_map(|c| if c == '"' || c == '\\' { vec!['\\', c] } else { vec![c] })
            .collect();
        format!("\"{escaped}\"")
    }
}

fn idents(xs: &[Ident]) -> String {
    xs.iter().map(|x| name(&x.name)).collect::<Vec<_>>().join(", ")
}

fn category(out: &mut String, c: &CategoryDecl) {
    let _ = writeln!(out, "category {} {{", c.name.name);
    let _ = writeln!(out, "  objects: {};", idents(&c.objects));
    let arrows: Vec<String> = c
        .arrows
        .iter()
        .map(|a| format!("{}: {} -> {}", name(&a.name.name), name(&a.source.name), name(&a.target.name)))
        .collect();
    let _ = writeln!(out, "  arrows: {};", arrows.join(", "));
    if !c.compose.is_empty() {
        let eqs: Vec<String> = c
            .compose
            .iter()
            .map(|e| format!("{} o {} = {}", name(&e.g.name), name(&e.f.name), name(&e.h.name)))
            .collect();
        let _ = writeln!(out, "  compose: {};", eqs.join(", "));
    }
    out.push_str("}\n");
}

fn topology(out: &mut String, t: &TopologyDecl) {
    let _ = writeln!(out, "topology {} on {} basis {{", t.name.name, t.category.name);
    for c in &t.covers {
        let _ = writeln!(out, "  cover {}: [{}];", name(&c.object.name), idents(&c.arrows));
    }
    out.push_str("}\n");
}

fn rhs(r: &Rhs) -> String {
    match r {
        Rhs::Elements(xs) => {
            if xs.is_empty() {
                "{}".into()
            } else {
                let names: Vec<String> = xs.iter().map(|x| name(&x.name)).collect();
                format!("{{ {} }}", names.join(", "))
            }
        }
        Rhs::Pairs(ps) => {
            if ps.is_empty() {
                "{}".into()
            } else {
                let pairs: Vec<String> = ps.iter().map(|(a, b)| format!("{} -> {}", name(&a.name), name(&b.name))).collect();
                format!("{{ {} }}", pairs.join(", "))
            }
        }
        Rhs::Module(fs) => {
            let parts: Vec<String> = fs
                .iter()
                .map(|&(o, c)| if c == 0 { o.to_string() } else { format!("{o}@{c}") })
                .collect();
            format!("({})", parts.join(", "))
        }
        Rhs::Matrix(rows) => {
            let rows: Vec<String> = rows
                .iter()
                .map(|r| format!("[{}]", r.iter().map(i64::to_string).collect::<Vec<_>>().join(", ")))
                .collect();
            format!("[{}]", rows.join(", "))
        }
    }
}

fn entries(out: &mut String, es: &[Entry]) {
    for e in es {
        let _ = writeln!(out, "  {}({}) = {};", e.owner.name, name(&e.at.name), rhs(&e.rhs));
    }
}

fn presheaf(out: &mut String, p: &PresheafDecl) {
    let flavor = match p.flavor {
        Flavor::Set => "Set",
        Flavor::Mod => "Mod",
    };
    let on = p.category.as_ref().map(|c| format!(" on {}", c.name)).unwrap_or_default();
    let _ = writeln!(out, "presheaf {}: {flavor}{on} {{", p.name.name);
    entries(out, &p.entries);
    out.push_str("}\n");
}

fn morphism(out: &mut String, m: &MorphismDecl) {
    let _ = writeln!(out, "morphism {}: {} -> {} {{", m.name.name, m.source.name, m.target.name);
    entries(out, &m.components);
    out.push_str("}\n");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    #[test]
    fn round_trip() {
        let src = r#"
            category C { objects: A, B; arrows: f: A -> B, g: A -> B; compose: id_B o f = f; }
            category G { objects: "*"; arrows: "g^1": "*" -> "*"; compose: "g^1" o "g^1" = "id_*"; }
            topology J on C basis { cover B: [f, g]; cover A: []; }
            ring Z/2 x Z/3;
            presheaf F: Set on C { F(A) = { a, "x y", "q\"" }; F(B) = {}; F(f) = {}; }
            presheaf G: Mod { G(A) = Z/2^2; G(B) = (2, 3@1); G(f) = [[1, 0], [-1, 2]]; }
            morphism m: F -> F { m(A) = { a -> a }; }
        "#;
        let doc = parse(src).unwrap();
        let text = print(&doc);
        assert_eq!(parse(&text).unwrap(), doc, "{text}");
        assert_eq!(print(&parse(&text).unwrap()), text);
    }
}
