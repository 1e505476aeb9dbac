//! Canonical printer. Output re-parses to an alpha-equivalent tree when the
//! same free variables are in scope.

use std::fmt::{self, Display, Write};

use crate::ast::*;

use super::{Decl, SourceProgram};

fn ty(out: &mut String, t: &ValueType, level: u8) {
    match t {
        ValueType::State => out.push_str("state"),
        ValueType::Unit => out.push_str("unit"),
        t if t.is_bool() => out.push_str("bool"),
        ValueType::Sum(a, b) => {
            paren(out, level > 0, |o| {
                ty(o, a, 1);
                o.push_str(" + ");
                ty(o, b, 0);
            });
        }
        ValueType::Prod(a, b) => {
            paren(out, level > 1, |o| {
                ty(o, a, 2);
                o.push_str(" * ");
                ty(o, b, 1);
            });
        }
        ValueType::Arrow(x, dom, cod) => {
            paren(out, level > 0, |o| {
                let _ = write!(o, "({x}:");
                ty(o, dom, 0);
                o.push_str(") -> ");
                comp_type(o, cod);
            });
        }
    }
}

fn paren(out: &mut String, wrap: bool, f: impl FnOnce(&mut String)) {
    if wrap {
        out.push('(');
    }
    f(out);
    if wrap {
        out.push(')');
    }
}

fn index(out: &mut String, b: &ValueTerm) {
    out.push('⟨');
    value(out, b, true);
    out.push('⟩');
}

fn comp_type(out: &mut String, c: &CompType) {
    match c {
        CompType::Mst { index: b, result, pre_binder, pre, post_binders, post } => {
            out.push_str("MST");
            index(out, b);
            out.push(' ');
            ty(out, result, 0);
            let _ = write!(out, " ({pre_binder}. ");
            formula(out, pre, 0);
            let _ = write!(out, ") ({} {} {}. ", post_binders.0, post_binders.1, post_binders.2);
            formula(out, post, 0);
            out.push(')');
        }
        CompType::Pure { result, pre, post_binder, post } => {
            out.push_str("Pure ");
            ty(out, result, 0);
            out.push_str(" (");
            formula(out, pre, 0);
            let _ = write!(out, ") ({post_binder}. ");
            formula(out, post, 0);
            out.push(')');
        }
    }
}

fn value(out: &mut String, v: &ValueTerm, atom: bool) {
    if let Some(b) = v.as_bool() {
        out.push_str(if b { "true" } else { "false" });
        return;
    }
    match v {
        ValueTerm::Var(x) | ValueTerm::Const(x) => out.push_str(x),
        ValueTerm::Unit => out.push_str("()"),
        ValueTerm::Pair(a, b) => {
            out.push('(');
            value(out, a, false);
            out.push_str(", ");
            value(out, b, false);
            out.push(')');
        }
        ValueTerm::Inl(a, t) | ValueTerm::Inr(a, t) => {
            out.push_str(if matches!(v, ValueTerm::Inl(..)) { "inl[" } else { "inr[" });
            ty(out, t, 0);
            out.push_str("] ");
            value(out, a, true);
        }
        ValueTerm::Lambda(x, t, body) => paren(out, atom, |o| {
            let _ = write!(o, "fun ({x}:");
            ty(o, t, 0);
            o.push_str(") -> ");
            comp(o, body);
        }),
        ValueTerm::Reify(e) => paren(out, atom, |o| {
            o.push_str("reify ");
            comp(o, e);
        }),
        ValueTerm::Prim(p, a) => paren(out, atom, |o| {
            o.push_str(p);
            o.push(' ');
            value(o, a, true);
        }),
    }
}

fn predicate(out: &mut String, p: &Predicate) {
    let _ = write!(out, "{}. ", p.binder);
    formula(out, &p.body, 0);
}

fn comp(out: &mut String, e: &CompTerm) {
    use CompTerm::*;
    match e {
        Located(_, e) => comp(out, e),
        Return(b, v) => {
            out.push_str("return");
            index(out, b);
            out.push(' ');
            value(out, v, false);
        }
        PureReturn(v) => {
            out.push_str("return ");
            value(out, v, false);
        }
        Bind(x, e1, e2) => {
            let _ = write!(out, "bind {x} = ");
            let wrap = matches!(e1.unlocated(), Bind(..) | PMatch(..) | Coerce(..) | Reflect(..));
            if wrap {
                out.push('{');
                comp(out, e1);
                out.push('}');
            } else {
                comp(out, e1);
            }
            out.push_str(" in ");
            comp(out, e2);
        }
        App(f, a) => {
            value(out, f, true);
            out.push(' ');
            value(out, a, true);
        }
        PMatch(v, x1, x2, body) => {
            out.push_str("pmatch ");
            value(out, v, false);
            let _ = write!(out, " with ({x1}, {x2}) -> ");
            comp(out, body);
        }
        Case(v, xl, el, xr, er) => {
            out.push_str("case ");
            value(out, v, false);
            let _ = write!(out, " of {{ inl {xl} -> ");
            comp(out, el);
            let _ = write!(out, " | inr {xr} -> ");
            comp(out, er);
            out.push_str(" }");
        }
        Get(b) => {
            out.push_str("get");
            index(out, b);
        }
        Put(b, v) => {
            out.push_str("put");
            index(out, b);
            out.push(' ');
            value(out, v, true);
        }
        Witness(b, p) | Recall(b, p) => {
            out.push_str(if matches!(e, Witness(..)) { "witness" } else { "recall" });
            index(out, b);
            out.push_str(" (");
            predicate(out, p);
            out.push(')');
        }
        Reflect(v) => {
            out.push_str("reflect ");
            value(out, v, false);
        }
        Coerce(e) => {
            out.push_str("coerce {");
            comp(out, e);
            out.push('}');
        }
    }
}

fn formula(out: &mut String, f: &Formula, level: u8) {
    match f {
        Formula::Top => out.push_str("top"),
        Formula::Bot => out.push_str("bot"),
        Formula::Atom(AtomHead::Rel, args) => {
            out.push_str("rel");
            for a in args {
                out.push(' ');
                value(out, a, true);
            }
        }
        Formula::Atom(AtomHead::Eq(t), args) => {
            if let [a, b] = args.as_slice() {
                value(out, a, true);
                if *t == ValueType::State {
                    out.push_str(" == ");
                } else {
                    out.push_str(" ==[");
                    ty(out, t, 0);
                    out.push_str("] ");
                }
                value(out, b, true);
            } else {
                // Malformed arity; printed for diagnostics only.
                let _ = write!(out, "<eq/{}>", args.len());
            }
        }
        Formula::Implies(a, b) => paren(out, level > 0, |o| {
            formula(o, a, 1);
            o.push_str(" ==> ");
            formula(o, b, 0);
        }),
        Formula::Or(a, b) => paren(out, level > 1, |o| {
            formula(o, a, 2);
            o.push_str(" \\/ ");
            formula(o, b, 1);
        }),
        Formula::And(a, b) => paren(out, level > 2, |o| {
            formula(o, a, 3);
            o.push_str(" /\\ ");
            formula(o, b, 2);
        }),
        Formula::Forall(x, t, body) | Formula::Exists(x, t, body) => paren(out, level > 0, |o| {
            let q = if matches!(f, Formula::Forall(..)) { "forall" } else { "exists" };
            let _ = write!(o, "{q} {x}:");
            ty(o, t, 0);
            o.push_str(". ");
            formula(o, body, 0);
        }),
        Formula::Witnessed(p) => {
            out.push_str("witnessed (");
            predicate(out, p);
            out.push(')');
        }
    }
}

fn render(f: impl FnOnce(&mut String)) -> String {
    let mut s = String::new();
    f(&mut s);
    s
}

pub fn pretty_type(t: &ValueType) -> String {
    render(|o| ty(o, t, 0))
}

pub fn pretty_comp_type(c: &CompType) -> String {
    render(|o| comp_type(o, c))
}

pub fn pretty_value(v: &ValueTerm) -> String {
    render(|o| value(o, v, false))
}

pub fn pretty_comp(e: &CompTerm) -> String {
    render(|o| comp(o, e))
}

pub fn pretty_formula(f: &Formula) -> String {
    render(|o| formula(o, f, 0))
}

pub fn pretty_predicate(p: &Predicate) -> String {
    render(|o| predicate(o, p))
}

pub fn pretty_program(p: &SourceProgram) -> String {
    let mut out = format!("domain {};\n", p.domain);
    for Decl { name, ascription, value: v, .. } in &p.decls {
        let _ = write!(out, "let {name}");
        if let Some(t) = ascription {
            out.push_str(" : ");
            ty(&mut out, t, 0);
        }
        out.push_str(" = ");
        value(&mut out, v, false);
        out.push_str(";\n");
    }
    out.push_str("main : ");
    comp_type(&mut out, &p.main.ty);
    out.push_str(" = ");
    comp(&mut out, &p.main.body);
    out.push_str(";\n");
    if let Some(v) = &p.expect {
        out.push_str("expect ");
        value(&mut out, v, false);
        out.push_str(";\n");
    }
    out
}

macro_rules! display_via {
    ($t:ty, $f:ident) => {
        impl Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&$f(self))
            }
        }
    };
}

display_via!(ValueType, pretty_type);
display_via!(CompType, pretty_comp_type);
display_via!(ValueTerm, pretty_value);
display_via!(CompTerm, pretty_comp);
display_via!(Formula, pretty_formula);
display_via!(Predicate, pretty_predicate);
display_via!(SourceProgram, pretty_program);
