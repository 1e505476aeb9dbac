//! Typing of the value terms that occur inside formulas, and collection of
//! ground subterms used as quantifier instantiations.

use std::collections::BTreeSet;

use crate::ast::*;
use crate::typecheck::TypingContext;

/// Type of a first-order term. Functions and reified computations are not
/// synthesised here; see [`term_has_type`].
pub fn term_type(ctx: &TypingContext, v: &ValueTerm) -> Option<ValueType> {
    match v {
        ValueTerm::Var(x) => ctx.lookup(x).cloned(),
        ValueTerm::Const(_) => Some(ValueType::State),
        ValueTerm::Unit => Some(ValueType::Unit),
        ValueTerm::Pair(a, b) => Some(ValueType::prod(term_type(ctx, a)?, term_type(ctx, b)?)),
        ValueTerm::Inl(a, r) => Some(ValueType::sum(term_type(ctx, a)?, r.clone())),
        ValueTerm::Inr(a, l) => Some(ValueType::sum(l.clone(), term_type(ctx, a)?)),
        ValueTerm::Prim(_, a) => match term_type(ctx, a)? {
            ValueType::State => Some(ValueType::State),
            _ => None,
        },
        ValueTerm::Lambda(..) | ValueTerm::Reify(_) => None,
    }
}

/// `Γ ⊢ v : t`. Lambdas and reified computations are accepted against any
/// arrow type with a matching domain; their bodies are checked by the
/// typechecker before they reach a formula.
pub fn term_has_type(ctx: &TypingContext, v: &ValueTerm, t: &ValueType) -> bool {
    match (v, t) {
        (ValueTerm::Pair(a, b), ValueType::Prod(ta, tb)) => term_has_type(ctx, a, ta) && term_has_type(ctx, b, tb),
        (ValueTerm::Inl(a, r), ValueType::Sum(ta, tb)) => alpha_eq(r, tb.as_ref()) && term_has_type(ctx, a, ta),
        (ValueTerm::Inr(a, l), ValueType::Sum(ta, tb)) => alpha_eq(l, ta.as_ref()) && term_has_type(ctx, a, tb),
        (ValueTerm::Lambda(_, dom, _), ValueType::Arrow(_, tdom, _)) => alpha_eq(dom, tdom.as_ref()),
        (ValueTerm::Reify(_), ValueType::Arrow(_, tdom, _)) => **tdom == ValueType::State,
        (ValueTerm::Var(x), t) => ctx.lookup(x).is_some_and(|u| alpha_eq(u, t)),
        _ => term_type(ctx, v).is_some_and(|u| alpha_eq(&u, t)),
    }
}

fn collect_value(v: &ValueTerm, bound: &[Name], out: &mut Vec<ValueTerm>) {
    if !v.free_vars().iter().any(|x| bound.contains(x)) && !out.iter().any(|w| alpha_eq(w, v)) {
        out.push(v.clone());
    }
    match v {
        ValueTerm::Pair(a, b) => {
            collect_value(a, bound, out);
            collect_value(b, bound, out);
        }
        ValueTerm::Inl(a, _) | ValueTerm::Inr(a, _) | ValueTerm::Prim(_, a) => collect_value(a, bound, out),
        _ => {}
    }
}

fn collect_formula(f: &Formula, bound: &mut Vec<Name>, out: &mut Vec<ValueTerm>) {
    match f {
        Formula::Atom(_, args) => {
            for a in args {
                collect_value(a, bound, out);
            }
        }
        Formula::Top | Formula::Bot => {}
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            collect_formula(a, bound, out);
            collect_formula(b, bound, out);
        }
        Formula::Forall(x, _, body) | Formula::Exists(x, _, body) => {
            bound.push(x.clone());
            collect_formula(body, bound, out);
            bound.pop();
        }
        Formula::Witnessed(p) => {
            bound.push(p.binder.clone());
            collect_formula(&p.body, bound, out);
            bound.pop();
        }
    }
}

/// Subterms of atom arguments that do not mention bound variables, in order
/// of first occurrence.
pub fn ground_subterms<'a>(fs: impl IntoIterator<Item = &'a Formula>) -> Vec<ValueTerm> {
    let mut out = Vec::new();
    for f in fs {
        collect_formula(f, &mut Vec::new(), &mut out);
    }
    out
}

/// Names of primitives applied anywhere in `fs`.
pub fn primitives_in<'a>(fs: impl IntoIterator<Item = &'a Formula>) -> BTreeSet<Name> {
    fn value(v: &ValueTerm, out: &mut BTreeSet<Name>) {
        match v {
            ValueTerm::Prim(p, a) => {
                out.insert(p.clone());
                value(a, out);
            }
            ValueTerm::Pair(a, b) => {
                value(a, out);
                value(b, out);
            }
            ValueTerm::Inl(a, _) | ValueTerm::Inr(a, _) => value(a, out),
            _ => {}
        }
    }
    fn formula(f: &Formula, out: &mut BTreeSet<Name>) {
        match f {
            Formula::Atom(_, args) => args.iter().for_each(|a| value(a, out)),
            Formula::Top | Formula::Bot => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                formula(a, out);
                formula(b, out);
            }
            Formula::Forall(_, _, b) | Formula::Exists(_, _, b) => formula(b, out),
            Formula::Witnessed(p) => formula(&p.body, out),
        }
    }
    let mut out = BTreeSet::new();
    for f in fs {
        formula(f, &mut out);
    }
    out
}
