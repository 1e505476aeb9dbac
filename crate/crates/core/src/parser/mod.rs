//! Concrete syntax: lexer, recursive-descent parser and canonical printer.
//!
//! Identifiers that are not bound by an enclosing binder (or passed in as
//! scope) parse as state constants; an unbound identifier applied to a value
//! atom parses as a primitive application. ASCII and Unicode spellings of the
//! connectives are interchangeable.

mod lexer;
mod parse;
mod pretty;

use thiserror::Error;

use crate::ast::*;
use crate::logic::Sequent;

pub use parse::is_keyword;
pub use pretty::{
    pretty_comp, pretty_comp_type, pretty_formula, pretty_predicate, pretty_program, pretty_type, pretty_value,
};

use parse::Parser;

#[derive(Clone, Debug, PartialEq, Error)]
#[error("{pos}: {message}{}", expected_suffix(.expected))]
pub struct ParseError {
    pub pos: Pos,
    pub message: String,
    pub expected: Vec<String>,
}

fn expected_suffix(expected: &[String]) -> String {
    if expected.is_empty() {
        String::new()
    } else {
        format!(" (expected {})", expected.join(", "))
    }
}

impl ParseError {
    pub fn new(pos: Pos, message: impl Into<String>, expected: Vec<String>) -> Self {
        ParseError { pos, message: message.into(), expected }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decl {
    pub name: Name,
    pub ascription: Option<ValueType>,
    pub value: ValueTerm,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MainDecl {
    pub ty: CompType,
    pub body: CompTerm,
    pub pos: Pos,
}

/// A whole source file: domain clause, declarations, `main` and an optional
/// expected result.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceProgram {
    pub domain: Name,
    pub decls: Vec<Decl>,
    pub main: MainDecl,
    pub expect: Option<ValueTerm>,
}

fn run<T>(src: &str, scope: &[Name], f: impl FnOnce(&mut Parser) -> Result<T, ParseError>) -> Result<T, ParseError> {
    let mut p = Parser::new(src, scope)?;
    let r = f(&mut p)?;
    p.expect_eof()?;
    Ok(r)
}

pub fn parse_program(src: &str) -> Result<SourceProgram, ParseError> {
    run(src, &[], |p| p.program())
}

pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    run(src, &[], |p| p.formula())
}

/// Parses a formula with `scope` treated as bound variables.
pub fn parse_formula_in(src: &str, scope: &[Name]) -> Result<Formula, ParseError> {
    run(src, scope, |p| p.formula())
}

pub fn parse_sequent(src: &str) -> Result<Sequent, ParseError> {
    run(src, &[], |p| p.sequent())
}

pub fn parse_value(src: &str) -> Result<ValueTerm, ParseError> {
    run(src, &[], |p| p.value())
}

pub fn parse_value_in(src: &str, scope: &[Name]) -> Result<ValueTerm, ParseError> {
    run(src, scope, |p| p.value())
}

pub fn parse_comp(src: &str) -> Result<CompTerm, ParseError> {
    run(src, &[], |p| p.comp())
}

pub fn parse_comp_in(src: &str, scope: &[Name]) -> Result<CompTerm, ParseError> {
    run(src, scope, |p| p.comp())
}

pub fn parse_type(src: &str) -> Result<ValueType, ParseError> {
    run(src, &[], |p| p.value_type())
}

pub fn parse_comp_type(src: &str) -> Result<CompType, ParseError> {
    run(src, &[], |p| p.comp_type())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &str) -> ValueTerm {
        ValueTerm::var(x)
    }

    #[test]
    fn witness_with_predicate() {
        let e = parse_comp("witness⟨false⟩ (s. rel c0 s)").unwrap();
        let expected = CompTerm::Witness(
            ValueTerm::ff(),
            Predicate::new("s", Formula::rel(ValueTerm::constant("c0"), v("s"))),
        );
        assert!(alpha_eq(&e, &expected));
        assert_eq!(pretty_comp(&e), "witness⟨false⟩ (s. rel c0 s)");
    }

    #[test]
    fn unclosed_paren_reports_position() {
        let err = parse_comp_in("witness⟨b⟩ (s. rel s s", &["b".into()]).unwrap_err();
        assert_eq!(err.pos, Pos { line: 1, col: 23 });
        assert!(err.expected.iter().any(|e| e == ")"), "{err}");
    }

    #[test]
    fn precedence_of_connectives() {
        let f = parse_formula("top /\\ bot \\/ top ==> bot ==> top").unwrap();
        let expected = Formula::implies(
            Formula::or(Formula::and(Formula::Top, Formula::Bot), Formula::Top),
            Formula::implies(Formula::Bot, Formula::Top),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn scope_decides_var_or_const() {
        let f = parse_formula("forall x:state. rel x c0").unwrap();
        assert_eq!(f, Formula::forall("x", ValueType::State, Formula::rel(v("x"), ValueTerm::constant("c0"))));
    }

    #[test]
    fn primitive_application() {
        let f = parse_formula("forall s:state. rel s (succ s)").unwrap();
        let body = Formula::rel(v("s"), ValueTerm::prim("succ", v("s")));
        assert_eq!(f, Formula::forall("s", ValueType::State, body));
    }

    #[test]
    fn typed_equality() {
        let f = parse_formula_in("x ==[unit * bool] (y, true)", &["x".into(), "y".into()]).unwrap();
        let t = ValueType::prod(ValueType::Unit, ValueType::bool());
        assert_eq!(f, Formula::eq(t, v("x"), ValueTerm::pair(v("y"), ValueTerm::tt())));
    }

    #[test]
    fn sequent_with_context() {
        let sq = parse_sequent("x:state | rel c0 x |- rel c0 x").unwrap();
        assert_eq!(sq.left.len(), 1);
        assert_eq!(sq.right.len(), 1);
        assert!(sq.ctx.contains("x"));
    }

    #[test]
    fn program_round_trips() {
        let src = "domain counter;\n\
                   let inc : (u:unit) -> MST<false> unit (s. top) (s r s'. rel s s') = fun (u:unit) -> bind x = get<false> in put<false> (succ x);\n\
                   main : MST<false> state (s. top) (s x s'. rel s x) = bind u = inc () in get<false>;\n\
                   expect c1;\n";
        let p = parse_program(src).unwrap();
        let printed = pretty_program(&p);
        let q = parse_program(&printed).unwrap();
        assert!(alpha_eq(&p.main.body, &q.main.body));
        assert!(alpha_eq(&p.main.ty, &q.main.ty));
        assert!(alpha_eq(&p.decls[0].value, &q.decls[0].value));
        assert_eq!(p.expect, q.expect);
    }

    #[test]
    fn if_desugars_to_case() {
        let e = parse_comp("if true then return<false> c0 else return<false> c1").unwrap();
        match e.unlocated() {
            CompTerm::Case(b, _, el, _, er) => {
                assert_eq!(b.as_bool(), Some(true));
                assert!(alpha_eq(er.as_ref(), &CompTerm::Return(ValueTerm::ff(), ValueTerm::constant("c0"))));
                assert!(alpha_eq(el.as_ref(), &CompTerm::Return(ValueTerm::ff(), ValueTerm::constant("c1"))));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_main_is_an_error() {
        assert!(parse_program("domain counter;").is_err());
    }
}
