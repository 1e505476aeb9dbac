use crate::ast::*;
use crate::logic::{FormulaSet, Sequent};
use crate::typecheck::TypingContext;

use super::lexer::{lex, Tok, Token};
use super::{Decl, MainDecl, ParseError, SourceProgram};

const KEYWORDS: &[&str] = &[
    "domain", "let", "main", "expect", "fun", "reify", "return", "bind", "in", "get", "put", "witness", "recall",
    "reflect", "coerce", "pmatch", "with", "case", "of", "inl", "inr", "if", "then", "else", "forall", "exists", "rel",
    "top", "bot", "witnessed", "true", "false", "state", "unit", "bool", "MST", "Pure",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

type PResult<T> = Result<T, ParseError>;

pub(super) struct Parser {
    toks: Vec<Token>,
    i: usize,
    scope: Vec<Name>,
}

impl Parser {
    pub(super) fn new(src: &str, scope: &[Name]) -> PResult<Self> {
        Ok(Parser { toks: lex(src)?, i: 0, scope: scope.to_vec() })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let j = (self.i + k).min(self.toks.len() - 1);
        &self.toks[j].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].tok.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn describe(tok: &Tok) -> String {
        match tok {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn fail<T>(&self, expected: &[&str]) -> PResult<T> {
        Err(ParseError::new(
            self.pos(),
            format!("unexpected {}", Self::describe(self.peek())),
            expected.iter().map(|s| s.to_string()).collect(),
        ))
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(t) if t == k)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if self.is_kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.fail(&[s])
        }
    }

    fn expect_kw(&mut self, k: &str) -> PResult<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            self.fail(&[k])
        }
    }

    fn ident(&mut self) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_keyword(&s) => {
                self.bump();
                Ok(s)
            }
            _ => self.fail(&["identifier"]),
        }
    }

    pub(super) fn expect_eof(&mut self) -> PResult<()> {
        if matches!(self.peek(), Tok::Eof) {
            Ok(())
        } else {
            self.fail(&["end of input"])
        }
    }

    fn scoped<T>(&mut self, names: &[Name], f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        let n = self.scope.len();
        self.scope.extend(names.iter().cloned());
        let r = f(self);
        self.scope.truncate(n);
        r
    }

    // ---- types -------------------------------------------------------------

    pub(super) fn value_type(&mut self) -> PResult<ValueType> {
        let left = self.prod_type()?;
        if self.eat_sym("+") {
            Ok(ValueType::sum(left, self.value_type()?))
        } else {
            Ok(left)
        }
    }

    fn prod_type(&mut self) -> PResult<ValueType> {
        let left = self.atom_type()?;
        if self.eat_sym("*") {
            Ok(ValueType::prod(left, self.prod_type()?))
        } else {
            Ok(left)
        }
    }

    fn atom_type(&mut self) -> PResult<ValueType> {
        if self.eat_kw("state") {
            return Ok(ValueType::State);
        }
        if self.eat_kw("unit") {
            return Ok(ValueType::Unit);
        }
        if self.eat_kw("bool") {
            return Ok(ValueType::bool());
        }
        if self.is_sym("(") {
            let arrow = matches!(self.peek_at(1), Tok::Ident(s) if !is_keyword(s)) && self.peek_at(2) == &Tok::Sym(":");
            self.bump();
            if arrow {
                let x = self.ident()?;
                self.expect_sym(":")?;
                let dom = self.value_type()?;
                self.expect_sym(")")?;
                self.expect_sym("->")?;
                let cod = self.scoped(std::slice::from_ref(&x), |p| p.comp_type())?;
                return Ok(ValueType::arrow(x, dom, cod));
            }
            let t = self.value_type()?;
            self.expect_sym(")")?;
            return Ok(t);
        }
        self.fail(&["state", "unit", "bool", "("])
    }

    fn index(&mut self) -> PResult<ValueTerm> {
        self.expect_sym("<")?;
        let v = self.value_atom()?;
        self.expect_sym(">")?;
        Ok(v)
    }

    pub(super) fn comp_type(&mut self) -> PResult<CompType> {
        if self.eat_kw("MST") {
            let index = self.index()?;
            let result = self.atom_or_value_type()?;
            self.expect_sym("(")?;
            let pre_binder = self.ident()?;
            self.expect_sym(".")?;
            let pre = self.scoped(std::slice::from_ref(&pre_binder), |p| p.formula())?;
            self.expect_sym(")")?;
            self.expect_sym("(")?;
            let s = self.ident()?;
            let x = self.ident()?;
            let s1 = self.ident()?;
            self.expect_sym(".")?;
            let post = self.scoped(&[s.clone(), x.clone(), s1.clone()], |p| p.formula())?;
            self.expect_sym(")")?;
            return Ok(CompType::Mst { index, result, pre_binder, pre, post_binders: (s, x, s1), post });
        }
        if self.eat_kw("Pure") {
            let result = self.atom_or_value_type()?;
            self.expect_sym("(")?;
            let pre = self.formula()?;
            self.expect_sym(")")?;
            self.expect_sym("(")?;
            let x = self.ident()?;
            self.expect_sym(".")?;
            let post = self.scoped(std::slice::from_ref(&x), |p| p.formula())?;
            self.expect_sym(")")?;
            return Ok(CompType::Pure { result, pre, post_binder: x, post });
        }
        self.fail(&["MST", "Pure"])
    }

    /// Result types in computation types are followed by `(`, so a full value
    /// type parses unambiguously except that a parenthesised group would be
    /// taken as the result type; the printer always parenthesises compound
    /// result types.
    fn atom_or_value_type(&mut self) -> PResult<ValueType> {
        self.value_type()
    }

    // ---- values ------------------------------------------------------------

    fn starts_value_atom(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => !is_keyword(s) || matches!(s.as_str(), "true" | "false" | "inl" | "inr"),
            Tok::Sym(s) => *s == "(",
            Tok::Eof => false,
        }
    }

    pub(super) fn value(&mut self) -> PResult<ValueTerm> {
        if self.eat_kw("fun") {
            self.expect_sym("(")?;
            let x = self.ident()?;
            self.expect_sym(":")?;
            let t = self.value_type()?;
            self.expect_sym(")")?;
            self.expect_sym("->")?;
            let body = self.scoped(std::slice::from_ref(&x), |p| p.comp())?;
            return Ok(ValueTerm::lambda(x, t, body));
        }
        if self.eat_kw("reify") {
            return Ok(ValueTerm::Reify(Box::new(self.comp()?)));
        }
        if let Tok::Ident(name) = self.peek().clone() {
            if !is_keyword(&name) && !self.scope.contains(&name) {
                let save = self.i;
                self.bump();
                if self.starts_value_atom() {
                    let arg = self.value_atom()?;
                    return Ok(ValueTerm::prim(name, arg));
                }
                self.i = save;
            }
        }
        self.value_atom()
    }

    fn value_atom(&mut self) -> PResult<ValueTerm> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Ok(ValueTerm::tt())
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                Ok(ValueTerm::ff())
            }
            Tok::Ident(s) if s == "inl" || s == "inr" => {
                self.bump();
                self.expect_sym("[")?;
                let t = self.value_type()?;
                self.expect_sym("]")?;
                let v = self.value_atom()?;
                Ok(if s == "inl" { ValueTerm::inl(v, t) } else { ValueTerm::inr(v, t) })
            }
            Tok::Ident(s) if !is_keyword(&s) => {
                self.bump();
                if self.scope.contains(&s) {
                    Ok(ValueTerm::Var(s))
                } else {
                    Ok(ValueTerm::Const(s))
                }
            }
            Tok::Sym("(") => {
                self.bump();
                if self.eat_sym(")") {
                    return Ok(ValueTerm::Unit);
                }
                let a = self.value()?;
                if self.eat_sym(",") {
                    let b = self.value()?;
                    self.expect_sym(")")?;
                    return Ok(ValueTerm::pair(a, b));
                }
                self.expect_sym(")")?;
                Ok(a)
            }
            _ => self.fail(&["value"]),
        }
    }

    // ---- computations -----------------------------------------------------

    pub(super) fn comp(&mut self) -> PResult<CompTerm> {
        let pos = self.pos();
        let e = self.comp_inner()?;
        Ok(match e {
            CompTerm::Located(..) => e,
            e => CompTerm::Located(pos, Box::new(e)),
        })
    }

    fn predicate_in_parens(&mut self) -> PResult<Predicate> {
        self.expect_sym("(")?;
        let p = self.predicate()?;
        self.expect_sym(")")?;
        Ok(p)
    }

    fn predicate(&mut self) -> PResult<Predicate> {
        let s = self.ident()?;
        self.expect_sym(".")?;
        let body = self.scoped(std::slice::from_ref(&s), |p| p.formula())?;
        Ok(Predicate::new(s, body))
    }

    fn comp_inner(&mut self) -> PResult<CompTerm> {
        if self.eat_kw("bind") {
            let x = self.ident()?;
            self.expect_sym("=")?;
            let e1 = self.comp()?;
            self.expect_kw("in")?;
            let e2 = self.scoped(std::slice::from_ref(&x), |p| p.comp())?;
            return Ok(CompTerm::bind(x, e1, e2));
        }
        if self.eat_kw("return") {
            if self.is_sym("<") {
                let b = self.index()?;
                return Ok(CompTerm::Return(b, self.value()?));
            }
            return Ok(CompTerm::PureReturn(self.value()?));
        }
        if self.eat_kw("get") {
            return Ok(CompTerm::Get(self.index()?));
        }
        if self.eat_kw("put") {
            let b = self.index()?;
            return Ok(CompTerm::Put(b, self.value()?));
        }
        if self.eat_kw("witness") {
            let b = self.index()?;
            return Ok(CompTerm::Witness(b, self.predicate_in_parens()?));
        }
        if self.eat_kw("recall") {
            let b = self.index()?;
            return Ok(CompTerm::Recall(b, self.predicate_in_parens()?));
        }
        if self.eat_kw("reflect") {
            return Ok(CompTerm::Reflect(self.value()?));
        }
        if self.eat_kw("coerce") {
            return Ok(CompTerm::Coerce(Box::new(self.comp()?)));
        }
        if self.eat_kw("pmatch") {
            let v = self.value()?;
            self.expect_kw("with")?;
            self.expect_sym("(")?;
            let x1 = self.ident()?;
            self.expect_sym(",")?;
            let x2 = self.ident()?;
            self.expect_sym(")")?;
            self.expect_sym("->")?;
            let e = self.scoped(&[x1.clone(), x2.clone()], |p| p.comp())?;
            return Ok(CompTerm::PMatch(v, x1, x2, Box::new(e)));
        }
        if self.eat_kw("case") {
            let v = self.value()?;
            self.expect_kw("of")?;
            self.expect_sym("{")?;
            self.expect_kw("inl")?;
            let xl = self.ident()?;
            self.expect_sym("->")?;
            let el = self.scoped(std::slice::from_ref(&xl), |p| p.comp())?;
            self.expect_sym("|")?;
            self.expect_kw("inr")?;
            let xr = self.ident()?;
            self.expect_sym("->")?;
            let er = self.scoped(std::slice::from_ref(&xr), |p| p.comp())?;
            self.expect_sym("}")?;
            return Ok(CompTerm::Case(v, xl, Box::new(el), xr, Box::new(er)));
        }
        if self.eat_kw("if") {
            let v = self.value()?;
            self.expect_kw("then")?;
            let then = self.comp()?;
            self.expect_kw("else")?;
            let els = self.comp()?;
            return Ok(CompTerm::Case(v, "_".into(), Box::new(els), "_".into(), Box::new(then)));
        }
        if self.eat_sym("{") {
            let e = self.comp()?;
            self.expect_sym("}")?;
            return Ok(e);
        }
        if self.starts_value_atom() {
            let f = self.value_atom()?;
            let a = self.value_atom()?;
            return Ok(CompTerm::App(f, a));
        }
        self.fail(&[
            "bind", "return", "get", "put", "witness", "recall", "reflect", "coerce", "pmatch", "case", "if", "{",
            "application",
        ])
    }

    // ---- formulas ---------------------------------------------------------

    pub(super) fn formula(&mut self) -> PResult<Formula> {
        if self.is_kw("forall") || self.is_kw("exists") {
            return self.quantified();
        }
        let left = self.disjunction()?;
        if self.eat_sym("==>") {
            Ok(Formula::implies(left, self.formula()?))
        } else {
            Ok(left)
        }
    }

    fn quantified(&mut self) -> PResult<Formula> {
        let universal = self.is_kw("forall");
        self.bump();
        let x = self.ident()?;
        self.expect_sym(":")?;
        let t = self.value_type()?;
        self.expect_sym(".")?;
        let body = self.scoped(std::slice::from_ref(&x), |p| p.formula())?;
        Ok(if universal { Formula::forall(x, t, body) } else { Formula::exists(x, t, body) })
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let left = self.conjunction()?;
        if self.eat_sym("\\/") {
            Ok(Formula::or(left, self.disjunction()?))
        } else {
            Ok(left)
        }
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let left = self.formula_atom()?;
        if self.eat_sym("/\\") {
            Ok(Formula::and(left, self.conjunction()?))
        } else {
            Ok(left)
        }
    }

    fn formula_atom(&mut self) -> PResult<Formula> {
        if self.is_kw("forall") || self.is_kw("exists") {
            return self.quantified();
        }
        if self.eat_kw("top") {
            return Ok(Formula::Top);
        }
        if self.eat_kw("bot") {
            return Ok(Formula::Bot);
        }
        if self.eat_kw("rel") {
            let a = self.value_atom()?;
            let b = self.value_atom()?;
            return Ok(Formula::rel(a, b));
        }
        if self.eat_kw("witnessed") {
            return Ok(Formula::Witnessed(self.predicate_in_parens()?));
        }
        if self.is_sym("(") {
            let save = self.i;
            self.bump();
            if let Ok(f) = self.formula() {
                if self.eat_sym(")") && !self.is_sym("==") {
                    return Ok(f);
                }
            }
            self.i = save;
        }
        let a = self.value()?;
        if !self.eat_sym("==") {
            return self.fail(&["=="]);
        }
        let t = if self.eat_sym("[") {
            let t = self.value_type()?;
            self.expect_sym("]")?;
            t
        } else {
            ValueType::State
        };
        let b = self.value()?;
        Ok(Formula::eq(t, a, b))
    }

    // ---- sequents and programs -------------------------------------------

    pub(super) fn sequent(&mut self) -> PResult<Sequent> {
        let mut ctx = TypingContext::new();
        let has_ctx = matches!(self.peek(), Tok::Ident(s) if !is_keyword(s)) && self.peek_at(1) == &Tok::Sym(":");
        if has_ctx {
            loop {
                let pos = self.pos();
                let x = self.ident()?;
                self.expect_sym(":")?;
                let t = self.value_type()?;
                if ctx.contains(&x) {
                    return Err(ParseError::new(pos, format!("duplicate context variable `{x}`"), vec![]));
                }
                ctx.push(x.clone(), t);
                self.scope.push(x);
                if !self.eat_sym(",") {
                    break;
                }
            }
            self.expect_sym("|")?;
        }
        let left = self.formula_list()?;
        self.expect_sym("|-")?;
        let right = self.formula_list()?;
        Ok(Sequent::new(ctx, FormulaSet::from_vec(left), FormulaSet::from_vec(right)))
    }

    fn formula_list(&mut self) -> PResult<Vec<Formula>> {
        let mut out = Vec::new();
        if self.is_sym("|-") || matches!(self.peek(), Tok::Eof) {
            return Ok(out);
        }
        loop {
            out.push(self.formula()?);
            if !self.eat_sym(",") {
                return Ok(out);
            }
        }
    }

    pub(super) fn program(&mut self) -> PResult<SourceProgram> {
        let mut domain = None;
        let mut decls = Vec::new();
        let mut main = None;
        let mut expect = None;
        loop {
            let pos = self.pos();
            if matches!(self.peek(), Tok::Eof) {
                break;
            }
            if self.eat_kw("domain") {
                if domain.is_some() {
                    return Err(ParseError::new(pos, "duplicate domain clause", vec![]));
                }
                domain = Some(self.ident()?);
                self.expect_sym(";")?;
            } else if self.eat_kw("let") {
                if main.is_some() {
                    return Err(ParseError::new(pos, "declarations must precede main", vec![]));
                }
                let name = self.ident()?;
                if decls.iter().any(|d: &Decl| d.name == name) {
                    return Err(ParseError::new(pos, format!("duplicate declaration `{name}`"), vec![]));
                }
                let ascription = if self.eat_sym(":") { Some(self.value_type()?) } else { None };
                self.expect_sym("=")?;
                let value = self.value()?;
                self.expect_sym(";")?;
                self.scope.push(name.clone());
                decls.push(Decl { name, ascription, value, pos });
            } else if self.eat_kw("main") {
                if main.is_some() {
                    return Err(ParseError::new(pos, "duplicate main", vec![]));
                }
                self.expect_sym(":")?;
                let ty = self.comp_type()?;
                self.expect_sym("=")?;
                let body = self.comp()?;
                self.expect_sym(";")?;
                main = Some(MainDecl { ty, body, pos });
            } else if self.eat_kw("expect") {
                if main.is_none() {
                    return Err(ParseError::new(pos, "expect clause must follow main", vec![]));
                }
                expect = Some(self.value()?);
                self.expect_sym(";")?;
            } else {
                return self.fail(&["domain", "let", "main", "expect"]);
            }
        }
        let end = self.pos();
        let domain = domain.ok_or_else(|| ParseError::new(end, "missing domain clause", vec!["domain".into()]))?;
        let main = main.ok_or_else(|| ParseError::new(end, "missing main computation", vec!["main".into()]))?;
        Ok(SourceProgram { domain, decls, main, expect })
    }
}
