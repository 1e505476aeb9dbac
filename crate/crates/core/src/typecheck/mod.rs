//! Well-formedness, typing and subtyping for computations with Hoare-style
//! `MST⟨b⟩` and `Pure` types. Typing is syntax-directed and produces logical
//! obligations; a program is accepted when the sequent prover discharges
//! every one of them.

mod context;
mod infer;
mod report;

use std::fmt;

use thiserror::Error;

use crate::ast::*;
use crate::logic::Sequent;

pub use context::TypingContext;
pub use infer::Checker;
pub use report::{
    check_comp, check_program, generate_program, Generated, discharge, link, CheckConfig, CheckReport, Verdict, DEFAULT_CHECK_DEPTH,
    PROVER_DEPTH_ENV,
};

#[derive(Clone, Debug, PartialEq, Error)]
pub struct TypeError {
    pub pos: Option<Pos>,
    pub message: String,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pos {
            Some(p) => write!(f, "{p}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// A sequent that must be provable for the typing derivation to hold,
/// tagged with the rule that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct Obligation {
    pub sequent: Sequent,
    pub rule: String,
    pub pos: Option<Pos>,
}

impl Obligation {
    /// E.g. `Sub-MST post at 12:3`.
    pub fn provenance(&self) -> String {
        match self.pos {
            Some(p) => format!("{} at {p}", self.rule),
            None => self.rule.clone(),
        }
    }
}

impl fmt::Display for Obligation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.provenance(), self.sequent)
    }
}

pub fn wf_type(ctx: &TypingContext, t: &ValueType) -> Result<(), TypeError> {
    Checker::new(None).wf_type(ctx, t)
}

pub fn wf_comp_type(ctx: &TypingContext, c: &CompType) -> Result<(), TypeError> {
    Checker::new(None).wf_comp_type(ctx, c)
}

pub fn wf_formula(ctx: &TypingContext, f: &Formula) -> Result<(), TypeError> {
    Checker::new(None).wf_formula(ctx, f)
}

pub fn infer_value(ctx: &TypingContext, v: &ValueTerm) -> Result<ValueType, TypeError> {
    Checker::new(None).infer_value(ctx, v)
}

pub fn infer_comp(ctx: &TypingContext, e: &CompTerm) -> Result<(CompType, Vec<Obligation>), TypeError> {
    let mut ch = Checker::new(None);
    let c = ch.infer_comp(ctx, e)?;
    Ok((c, ch.take_obligations()))
}

/// Effect indices that are not the literal `false`, and uses of
/// `reify`/`reflect`/`coerce`: everything outside the abstract fragment.
pub fn abstract_fragment_violations(e: &CompTerm) -> Vec<String> {
    let mut out = Vec::new();
    lint_comp(e, &mut out);
    out
}

fn lint_index(b: &ValueTerm, what: &str, out: &mut Vec<String>) {
    if b.as_bool() != Some(false) {
        out.push(format!("{what} with index {b}"));
    }
}

fn lint_value(v: &ValueTerm, out: &mut Vec<String>) {
    match v {
        ValueTerm::Lambda(_, _, e) => lint_comp(e, out),
        ValueTerm::Reify(_) => out.push("reify".into()),
        ValueTerm::Pair(a, b) => {
            lint_value(a, out);
            lint_value(b, out);
        }
        ValueTerm::Inl(a, _) | ValueTerm::Inr(a, _) | ValueTerm::Prim(_, a) => lint_value(a, out),
        _ => {}
    }
}

fn lint_comp(e: &CompTerm, out: &mut Vec<String>) {
    match e {
        CompTerm::Located(_, e) => lint_comp(e, out),
        CompTerm::Return(b, v) => {
            lint_index(b, "return", out);
            lint_value(v, out);
        }
        CompTerm::PureReturn(v) => lint_value(v, out),
        CompTerm::Bind(_, a, b) => {
            lint_comp(a, out);
            lint_comp(b, out);
        }
        CompTerm::App(f, a) => {
            lint_value(f, out);
            lint_value(a, out);
        }
        CompTerm::PMatch(v, _, _, e) => {
            lint_value(v, out);
            lint_comp(e, out);
        }
        CompTerm::Case(v, _, a, _, b) => {
            lint_value(v, out);
            lint_comp(a, out);
            lint_comp(b, out);
        }
        CompTerm::Get(b) => lint_index(b, "get", out),
        CompTerm::Put(b, v) => {
            lint_index(b, "put", out);
            lint_value(v, out);
        }
        CompTerm::Witness(b, _) => lint_index(b, "witness", out),
        CompTerm::Recall(b, _) => lint_index(b, "recall", out),
        CompTerm::Reflect(_) => out.push("reflect".into()),
        CompTerm::Coerce(_) => out.push("coerce".into()),
    }
}

#[cfg(test)]
mod tests;
