use crate::ast::*;
use crate::diag::{Diagnostic, Stage};
use crate::lexer::{lex, Tok, Token};

type PResult<T> = Result<T, Diagnostic>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

/// Parses a whole document. On a syntax error the parser skips to the next
/// `;` and continues, so one run reports every broken statement.
pub fn parse(src: &str) -> Result<Document, Vec<Diagnostic>> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    let mut doc = Document::default();
    let mut errors = Vec::new();
    while !p.at(&Tok::Eof) {
        match p.decl(&mut errors) {
            Ok(d) => doc.decls.push(d),
            Err(e) => {
                errors.push(e);
                p.resync_top();
            }
        }
    }
    if errors.is_empty() {
        Ok(doc)
    } else {
        Err(errors)
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn at(&self, t: &Tok) -> bool {
        self.peek() == t
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        Err(Diagnostic::new(
            Stage::Syntax,
            self.span(),
            format!("expected {expected}, found {}", self.peek().describe()),
        ))
    }

    fn expect(&mut self, t: Tok) -> PResult<Span> {
        if self.at(&t) {
            Ok(self.bump().span)
        } else {
            self.error(&t.describe())
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<Span> {
        if self.at_keyword(kw) {
            Ok(self.bump().span)
        } else {
            self.error(&format!("`{kw}`"))
        }
    }

    fn ident(&mut self) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Ident(name) => Ok(Ident { name, span: self.bump().span }),
            _ => self.error("an identifier"),
        }
    }

    /// An object, arrow or element name: an identifier or a quoted string.
    fn name(&mut self) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Ident(name) | Tok::Str(name) => Ok(Ident { name, span: self.bump().span }),
            _ => self.error("a name"),
        }
    }

    fn int(&mut self) -> PResult<i64> {
        match *self.peek() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            _ => self.error("an integer"),
        }
    }

    fn positive(&mut self) -> PResult<u64> {
        let span = self.span();
        let n = self.int()?;
        if n <= 0 {
            return Err(Diagnostic::new(Stage::Syntax, span, format!("expected a positive integer, found `{n}`")));
        }
        Ok(n as u64)
    }

    fn comma_list<T>(&mut self, close: &Tok, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        let mut out = Vec::new();
        if self.at(close) {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.at(&Tok::Comma) {
                self.bump();
            } else {
                return Ok(out);
            }
        }
    }

    fn resync_stmt(&mut self) {
        while !self.at(&Tok::Eof) && !self.at(&Tok::RBrace) {
            if self.bump().tok == Tok::Semi {
                return;
            }
        }
    }

    fn resync_top(&mut self) {
        let mut depth = 0usize;
        while !self.at(&Tok::Eof) {
            match self.bump().tok {
                Tok::LBrace => depth += 1,
                Tok::RBrace if depth <= 1 => return,
                Tok::RBrace => depth -= 1,
                Tok::Semi if depth == 0 => return,
                _ => {}
            }
        }
    }

    /// `{ stmt* }` where each statement recovers on its own.
    fn block<T>(
        &mut self,
        errors: &mut Vec<Diagnostic>,
        mut stmt: impl FnMut(&mut Self) -> PResult<T>,
    ) -> PResult<Vec<T>> {
        self.expect(Tok::LBrace)?;
        let mut out = Vec::new();
        while !self.at(&Tok::RBrace) {
            if self.at(&Tok::Eof) {
                return self.error("`}`");
            }
            match stmt(self) {
                Ok(s) => out.push(s),
                Err(e) => {
                    errors.push(e);
                    self.resync_stmt();
                }
            }
        }
        self.bump();
        Ok(out)
    }

    fn decl(&mut self, errors: &mut Vec<Diagnostic>) -> PResult<Decl> {
        let span = self.span();
        match self.peek() {
            Tok::Ident(kw) if kw == "category" => self.category(span, errors).map(Decl::Category),
            Tok::Ident(kw) if kw == "topology" => self.topology(span, errors).map(Decl::Topology),
            Tok::Ident(kw) if kw == "ring" => self.ring(span).map(Decl::Ring),
            Tok::Ident(kw) if kw == "presheaf" => self.presheaf(span, errors).map(Decl::Presheaf),
            Tok::Ident(kw) if kw == "morphism" => self.morphism(span, errors).map(Decl::Morphism),
            _ => self.error("`category`, `topology`, `ring`, `presheaf` or `morphism`"),
        }
    }

    fn category(&mut self, span: Span, errors: &mut Vec<Diagnostic>) -> PResult<CategoryDecl> {
        self.bump();
        let name = self.ident()?;
        let mut decl = CategoryDecl { name, objects: vec![], arrows: vec![], compose: vec![], span };
        enum Part {
            Objects(Vec<Ident>),
            Arrows(Vec<ArrowDecl>),
            Compose(Vec<ComposeEq>),
        }
        let parts = self.block(errors, |p| {
            let part = if p.at_keyword("objects") {
                p.bump();
                p.expect(Tok::Colon)?;
                Part::Objects(p.comma_list(&Tok::Semi, Self::name)?)
            } else if p.at_keyword("arrows") {
                p.bump();
                p.expect(Tok::Colon)?;
                Part::Arrows(p.comma_list(&Tok::Semi, |p| {
                    let name = p.name()?;
                    p.expect(Tok::Colon)?;
                    let source = p.name()?;
                    p.expect(Tok::Arrow)?;
                    let target = p.name()?;
                    Ok(ArrowDecl { name, source, target })
                })?)
            } else if p.at_keyword("compose") {
                p.bump();
                p.expect(Tok::Colon)?;
                Part::Compose(p.comma_list(&Tok::Semi, |p| {
                    let g = p.name()?;
                    p.keyword("o")?;
                    let f = p.name()?;
                    p.expect(Tok::Eq)?;
                    let h = p.name()?;
                    Ok(ComposeEq { g, f, h })
                })?)
            } else {
                return p.error("`objects:`, `arrows:` or `compose:`");
            };
            p.expect(Tok::Semi)?;
            Ok(part)
        })?;
        for part in parts {
            match part {
                Part::Objects(o) => decl.objects.extend(o),
                Part::Arrows(a) => decl.arrows.extend(a),
                Part::Compose(c) => decl.compose.extend(c),
            }
        }
        Ok(decl)
    }

    fn topology(&mut self, span: Span, errors: &mut Vec<Diagnostic>) -> PResult<TopologyDecl> {
        self.bump();
        let name = self.ident()?;
        self.keyword("on")?;
        let category = self.ident()?;
        self.keyword("basis")?;
        let covers = self.block(errors, |p| {
            p.keyword("cover")?;
            let object = p.name()?;
            p.expect(Tok::Colon)?;
            p.expect(Tok::LBracket)?;
            let arrows = p.comma_list(&Tok::RBracket, Self::name)?;
            p.expect(Tok::RBracket)?;
            p.expect(Tok::Semi)?;
            Ok(CoverDecl { object, arrows })
        })?;
        Ok(TopologyDecl { name, category, covers, span })
    }

    /// `Z/n` factors joined by `x`.
    fn ring_expr(&mut self) -> PResult<Vec<u64>> {
        let mut comps = vec![self.cyclic()?];
        while self.at_keyword("x") {
            self.bump();
            comps.push(self.cyclic()?);
        }
        Ok(comps)
    }

    fn cyclic(&mut self) -> PResult<u64> {
        self.keyword("Z")?;
        self.expect(Tok::Slash)?;
        self.positive()
    }

    fn ring(&mut self, span: Span) -> PResult<RingDecl> {
        self.bump();
        let components = self.ring_expr()?;
        self.expect(Tok::Semi)?;
        Ok(RingDecl { components, span })
    }

    fn presheaf(&mut self, span: Span, errors: &mut Vec<Diagnostic>) -> PResult<PresheafDecl> {
        self.bump();
        let name = self.ident()?;
        self.expect(Tok::Colon)?;
        let flavor = if self.at_keyword("Set") {
            Flavor::Set
        } else if self.at_keyword("Mod") {
            Flavor::Mod
        } else {
            return self.error("`Set` or `Mod`");
        };
        self.bump();
        let category = if self.at_keyword("on") {
            self.bump();
            Some(self.ident()?)
        } else {
            None
        };
        let entries = self.block(errors, Self::entry)?;
        Ok(PresheafDecl { name, flavor, category, entries, span })
    }

    fn morphism(&mut self, span: Span, errors: &mut Vec<Diagnostic>) -> PResult<MorphismDecl> {
        self.bump();
        let name = self.ident()?;
        self.expect(Tok::Colon)?;
        let source = self.ident()?;
        self.expect(Tok::Arrow)?;
        let target = self.ident()?;
        let components = self.block(errors, Self::entry)?;
        Ok(MorphismDecl { name, source, target, components, span })
    }

    fn entry(&mut self) -> PResult<Entry> {
        let owner = self.ident()?;
        self.expect(Tok::LParen)?;
        let at = self.name()?;
        self.expect(Tok::RParen)?;
        self.expect(Tok::Eq)?;
        let rhs = self.rhs()?;
        self.expect(Tok::Semi)?;
        Ok(Entry { owner, at, rhs })
    }

    fn rhs(&mut self) -> PResult<Rhs> {
        match self.peek() {
            Tok::LBrace => {
                self.bump();
                if self.at(&Tok::RBrace) {
                    self.bump();
                    return Ok(Rhs::Elements(vec![]));
                }
                let first = self.name()?;
                let out = if self.at(&Tok::Arrow) {
                    self.bump();
                    let mut pairs = vec![(first, self.name()?)];
                    while self.at(&Tok::Comma) {
                        self.bump();
                        let a = self.name()?;
                        self.expect(Tok::Arrow)?;
                        pairs.push((a, self.name()?));
                    }
                    Rhs::Pairs(pairs)
                } else {
                    let mut names = vec![first];
                    while self.at(&Tok::Comma) {
                        self.bump();
                        names.push(self.name()?);
                    }
                    Rhs::Elements(names)
                };
                self.expect(Tok::RBrace)?;
                Ok(out)
            }
            Tok::LBracket => {
                self.bump();
                let rows = self.comma_list(&Tok::RBracket, |p| {
                    p.expect(Tok::LBracket)?;
                    let row = p.comma_list(&Tok::RBracket, Self::int)?;
                    p.expect(Tok::RBracket)?;
                    Ok(row)
                })?;
                self.expect(Tok::RBracket)?;
                Ok(Rhs::Matrix(rows))
            }
            Tok::LParen => {
                self.bump();
                let factors = self.comma_list(&Tok::RParen, |p| {
                    let order = p.positive()?;
                    let component = if p.at(&Tok::At) {
                        p.bump();
                        let span = p.span();
                        usize::try_from(p.int()?).map_err(|_| {
                            Diagnostic::new(Stage::Syntax, span, "ring component must be non-negative")
                        })?
                    } else {
                        0
                    };
                    Ok((order, component))
                })?;
                self.expect(Tok::RParen)?;
                Ok(Rhs::Module(factors))
            }
            Tok::Int(0) => {
                self.bump();
                Ok(Rhs::Module(vec![]))
            }
            Tok::Ident(z) if z == "Z" => {
                let order = self.cyclic()?;
                let power = if self.at(&Tok::Caret) {
                    self.bump();
                    self.positive()?
                } else {
                    1
                };
                Ok(Rhs::Module(vec![(order, 0); power as usize]))
            }
            _ => self.error("`{`, `[`, `(`, `0` or `Z/n`"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const C2: &str = "
        // C2 with the topology J2
        category C2 {
          objects: U, V;
          arrows: i: U -> V;
        }
        topology J2 on C2 basis {
          cover V: [i];
          cover U: [id_U];
        }
        presheaf F: Set {
          F(V) = { p };
          F(U) = { a, b };
          F(i) = { p -> a };
        }
    ";

    #[test]
    fn c2_fixture() {
        let doc = parse(C2).unwrap();
        assert_eq!(doc.categories().count(), 1);
        assert_eq!(doc.topologies().count(), 1);
        assert_eq!(doc.presheaves().count(), 1);
        let c = doc.categories().next().unwrap();
        assert_eq!(c.arrows[0].name.name, "i");
        assert_eq!((c.arrows[0].name.span.line, c.arrows[0].name.span.col), (5, 19));
    }

    #[test]
    fn hole_in_arrow_is_a_syntax_error() {
        let errs = parse("category C { objects: A; arrows: f: A -> ; }").unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].stage, Stage::Syntax);
        assert_eq!(errs[0].span.col, 42);
        assert!(errs[0].message.contains("found `;`"), "{}", errs[0]);
    }

    #[test]
    fn recovery_reports_each_statement() {
        let src = "category C { objects A; arrows: f A -> A; }\nring Z/0;\nring Z/2;";
        let errs = parse(src).unwrap_err();
        assert_eq!(errs.len(), 3, "{errs:?}");
        assert_eq!(errs[2].span.line, 2);
    }

    #[test]
    fn modules_and_matrices() {
        let doc = parse("ring Z/2 x Z/3; presheaf G: Mod on C { G(A) = Z/4^2; G(B) = (2, 3@1); G(C) = 0; G(f) = [[1, -1], []]; }")
            .unwrap();
        let p = doc.presheaves().next().unwrap();
        assert_eq!(p.entries[0].rhs, Rhs::Module(vec![(4, 0), (4, 0)]));
        assert_eq!(p.entries[1].rhs, Rhs::Module(vec![(2, 0), (3, 1)]));
        assert_eq!(p.entries[2].rhs, Rhs::Module(vec![]));
        assert_eq!(p.entries[3].rhs, Rhs::Matrix(vec![vec![1, -1], vec![]]));
    }
}
