use std::fmt::{self, Write};

use crate::ast::*;

use super::sequent::{FormulaSet, Sequent};
use super::terms::term_has_type;

/// Sequent-calculus rule instances. The payload names the principal
/// formula(s) and any eigenvariable or instantiation term, so that a proof
/// can be checked without search.
#[derive(Clone, Debug, PartialEq)]
pub enum Rule {
    Ax(Formula),
    BotL,
    TopR,
    AndL(Formula),
    AndR(Formula),
    OrL(Formula),
    OrR(Formula),
    ImpliesL(Formula),
    ImpliesR(Formula),
    ForallL(Formula, ValueTerm),
    ForallR(Formula, Name),
    ExistsL(Formula, Name),
    ExistsR(Formula, ValueTerm),
    WitnessedWeaken { left: Formula, right: Formula, var: Name },
    EqRefl(ValueTerm, ValueType),
    /// From `eq = (a == b)` and atom `from`, add `to`, which is `from` with
    /// some occurrences of `a` replaced by `b`.
    EqTransport { eq: Formula, from: Formula, to: Formula },
    RelRefl(ValueTerm),
    RelTrans(Formula, Formula),
    SumDisjoint(Formula),
    PairInjective(Formula, usize),
    /// Case split on a boolean term (`v == false` / `v == true`).
    BoolCase(ValueTerm),
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Ax(_) => "Ax",
            Rule::BotL => "Bot-L",
            Rule::TopR => "Top-R",
            Rule::AndL(_) => "And-L",
            Rule::AndR(_) => "And-R",
            Rule::OrL(_) => "Or-L",
            Rule::OrR(_) => "Or-R",
            Rule::ImpliesL(_) => "Implies-L",
            Rule::ImpliesR(_) => "Implies-R",
            Rule::ForallL(..) => "Forall-L",
            Rule::ForallR(..) => "Forall-R",
            Rule::ExistsL(..) => "Exists-L",
            Rule::ExistsR(..) => "Exists-R",
            Rule::WitnessedWeaken { .. } => "Witnessed-Weaken-SC",
            Rule::EqRefl(..) => "Eq-Refl-SC",
            Rule::EqTransport { .. } => "Eq-Transport-SC",
            Rule::RelRefl(_) => "Rel-Refl-SC",
            Rule::RelTrans(..) => "Rel-Trans-SC",
            Rule::SumDisjoint(_) => "Sum-Disjoint-SC",
            Rule::PairInjective(..) => "Pair-Injective-SC",
            Rule::BoolCase(_) => "Bool-Case-SC",
        }
    }

    /// Rules that consume search depth; the others are invertible or
    /// belong to the saturating atomic engine.
    pub fn is_counted(&self) -> bool {
        matches!(self, Rule::ForallL(..) | Rule::ExistsR(..) | Rule::WitnessedWeaken { .. } | Rule::BoolCase(_))
    }

    fn rename(&self, from: &str, to: &str) -> Rule {
        let f = |x: &Formula| x.rename(from, to);
        let v = |x: &ValueTerm| x.rename(from, to);
        match self {
            Rule::Ax(a) => Rule::Ax(f(a)),
            Rule::BotL => Rule::BotL,
            Rule::TopR => Rule::TopR,
            Rule::AndL(a) => Rule::AndL(f(a)),
            Rule::AndR(a) => Rule::AndR(f(a)),
            Rule::OrL(a) => Rule::OrL(f(a)),
            Rule::OrR(a) => Rule::OrR(f(a)),
            Rule::ImpliesL(a) => Rule::ImpliesL(f(a)),
            Rule::ImpliesR(a) => Rule::ImpliesR(f(a)),
            Rule::ForallL(a, t) => Rule::ForallL(f(a), v(t)),
            Rule::ForallR(a, y) => Rule::ForallR(f(a), y.clone()),
            Rule::ExistsL(a, y) => Rule::ExistsL(f(a), y.clone()),
            Rule::ExistsR(a, t) => Rule::ExistsR(f(a), v(t)),
            Rule::WitnessedWeaken { left, right, var } => {
                Rule::WitnessedWeaken { left: f(left), right: f(right), var: var.clone() }
            }
            Rule::EqRefl(t, ty) => Rule::EqRefl(v(t), ty.rename(from, to)),
            Rule::EqTransport { eq, from: a, to: b } => Rule::EqTransport { eq: f(eq), from: f(a), to: f(b) },
            Rule::RelRefl(t) => Rule::RelRefl(v(t)),
            Rule::RelTrans(a, b) => Rule::RelTrans(f(a), f(b)),
            Rule::SumDisjoint(a) => Rule::SumDisjoint(f(a)),
            Rule::PairInjective(a, i) => Rule::PairInjective(f(a), *i),
            Rule::BoolCase(t) => Rule::BoolCase(v(t)),
        }
    }
}

/// A sequent-calculus derivation tree.
#[derive(Clone, Debug, PartialEq)]
pub struct Proof {
    pub rule: Rule,
    pub conclusion: Sequent,
    pub premises: Vec<Proof>,
}

impl Proof {
    pub fn new(rule: Rule, conclusion: Sequent, premises: Vec<Proof>) -> Self {
        Proof { rule, conclusion, premises }
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Proof::size).sum::<usize>()
    }

    /// Number of depth-consuming rule applications on the longest branch.
    pub fn depth(&self) -> usize {
        let here = usize::from(self.rule.is_counted());
        here + self.premises.iter().map(Proof::depth).max().unwrap_or(0)
    }

    /// Names of all rules used, in pre-order.
    pub fn rules(&self) -> Vec<&'static str> {
        let mut out = vec![self.rule.name()];
        for p in &self.premises {
            out.extend(p.rules());
        }
        out
    }

    pub fn uses(&self, rule: &str) -> bool {
        self.rule.name() == rule || self.premises.iter().any(|p| p.uses(rule))
    }

    /// Renames a free variable throughout; `to` must be fresh for the tree.
    pub fn rename(&self, from: &str, to: &str) -> Proof {
        Proof {
            rule: self.rule.rename(from, to),
            conclusion: self.conclusion.rename(from, to),
            premises: self.premises.iter().map(|p| p.rename(from, to)).collect(),
        }
    }

    /// Indented rendering, one node per line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0);
        out
    }

    fn render_into(&self, out: &mut String, indent: usize) {
        let _ = writeln!(out, "{:indent$}{}  [{}]", "", self.conclusion, self.rule.name(), indent = indent);
        for p in &self.premises {
            p.render_into(out, indent + 2);
        }
    }
}

impl fmt::Display for Proof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Why a proof failed to check: the path of premise indices from the root to
/// the offending node, its rule, and a message.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("at {}: {rule}: {message}", path_string(.path))]
pub struct ProofError {
    pub path: Vec<usize>,
    pub rule: &'static str,
    pub message: String,
}

fn path_string(p: &[usize]) -> String {
    if p.is_empty() {
        "root".into()
    } else {
        p.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
    }
}

/// Checks every node against its rule schema, side conditions included.
pub fn check_proof(p: &Proof) -> Result<(), ProofError> {
    let mut path = Vec::new();
    check_rec(p, &mut path)
}

fn check_rec(p: &Proof, path: &mut Vec<usize>) -> Result<(), ProofError> {
    check_node(p).map_err(|message| ProofError { path: path.clone(), rule: p.rule.name(), message })?;
    for (i, q) in p.premises.iter().enumerate() {
        path.push(i);
        check_rec(q, path)?;
        path.pop();
    }
    Ok(())
}

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn arity(p: &Proof, n: usize) -> Check {
    ensure(p.premises.len() == n, format!("expected {n} premise(s), found {}", p.premises.len()))
}

/// The premise side equals the conclusion side with `principal` removed (or
/// kept) and `add` inserted.
fn side_ok(actual: &FormulaSet, concl: &FormulaSet, principal: Option<&Formula>, add: &[Formula]) -> bool {
    let base = match principal {
        Some(p) => concl.without(p),
        None => concl.clone(),
    }
    .with_all(add.iter().cloned());
    actual.set_eq(&base) || (principal.is_some() && actual.set_eq(&concl.with_all(add.iter().cloned())))
}

fn same_ctx(p: &Proof, i: usize) -> Check {
    ensure(p.premises[i].conclusion.ctx == p.conclusion.ctx, "premise context differs from conclusion context")
}

fn left_rule(p: &Proof, i: usize, principal: Option<&Formula>, add: &[Formula]) -> Check {
    let (c, q) = (&p.conclusion, &p.premises[i].conclusion);
    ensure(side_ok(&q.left, &c.left, principal, add), format!("premise {i} left side does not match schema"))?;
    ensure(q.right.set_eq(&c.right), format!("premise {i} right side must equal the conclusion's"))
}

fn right_rule(p: &Proof, i: usize, principal: Option<&Formula>, add: &[Formula]) -> Check {
    let (c, q) = (&p.conclusion, &p.premises[i].conclusion);
    ensure(side_ok(&q.right, &c.right, principal, add), format!("premise {i} right side does not match schema"))?;
    ensure(q.left.set_eq(&c.left), format!("premise {i} left side must equal the conclusion's"))
}

fn on_left(c: &Sequent, f: &Formula) -> Check {
    ensure(c.left.contains(f), format!("principal formula `{f}` is not on the left"))
}

fn on_right(c: &Sequent, f: &Formula) -> Check {
    ensure(c.right.contains(f), format!("principal formula `{f}` is not on the right"))
}

fn eigen_ok(c: &Sequent, y: &str) -> Check {
    ensure(!c.ctx.contains(y) && !c.free_vars().contains(y), format!("eigenvariable `{y}` is not fresh"))
}

fn eq_parts(f: &Formula) -> Option<(&ValueType, &ValueTerm, &ValueTerm)> {
    match f {
        Formula::Atom(AtomHead::Eq(t), args) if args.len() == 2 => Some((t, &args[0], &args[1])),
        _ => None,
    }
}

fn rel_parts(f: &Formula) -> Option<(&ValueTerm, &ValueTerm)> {
    match f {
        Formula::Atom(AtomHead::Rel, args) if args.len() == 2 => Some((&args[0], &args[1])),
        _ => None,
    }
}

/// `to` arises from `from` by replacing some occurrences of `a` with `b`.
pub(crate) fn transports(from: &ValueTerm, to: &ValueTerm, a: &ValueTerm, b: &ValueTerm) -> bool {
    if alpha_eq(from, to) || (alpha_eq(from, a) && alpha_eq(to, b)) {
        return true;
    }
    match (from, to) {
        (ValueTerm::Pair(x1, y1), ValueTerm::Pair(x2, y2)) => transports(x1, x2, a, b) && transports(y1, y2, a, b),
        (ValueTerm::Inl(x1, t1), ValueTerm::Inl(x2, t2)) | (ValueTerm::Inr(x1, t1), ValueTerm::Inr(x2, t2)) => {
            alpha_eq(t1, t2) && transports(x1, x2, a, b)
        }
        (ValueTerm::Prim(p1, x1), ValueTerm::Prim(p2, x2)) => p1 == p2 && transports(x1, x2, a, b),
        _ => false,
    }
}

pub(crate) fn atom_transports(from: &Formula, to: &Formula, a: &ValueTerm, b: &ValueTerm) -> bool {
    match (from, to) {
        (Formula::Atom(h1, xs), Formula::Atom(h2, ys)) => {
            let heads = match (h1, h2) {
                (AtomHead::Rel, AtomHead::Rel) => true,
                (AtomHead::Eq(t), AtomHead::Eq(u)) => alpha_eq(t, u),
                _ => false,
            };
            heads && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| transports(x, y, a, b))
        }
        _ => false,
    }
}

fn check_node(p: &Proof) -> Check {
    let c = &p.conclusion;
    match &p.rule {
        Rule::Ax(f) => {
            arity(p, 0)?;
            on_left(c, f)?;
            on_right(c, f)
        }
        Rule::BotL => {
            arity(p, 0)?;
            on_left(c, &Formula::Bot)
        }
        Rule::TopR => {
            arity(p, 0)?;
            on_right(c, &Formula::Top)
        }
        Rule::AndL(f) => match f {
            Formula::And(a, b) => {
                arity(p, 1)?;
                on_left(c, f)?;
                same_ctx(p, 0)?;
                left_rule(p, 0, Some(f), &[(**a).clone(), (**b).clone()])
            }
            _ => Err("principal formula is not a conjunction".into()),
        },
        Rule::AndR(f) => match f {
            Formula::And(a, b) => {
                arity(p, 2)?;
                on_right(c, f)?;
                same_ctx(p, 0)?;
                same_ctx(p, 1)?;
                right_rule(p, 0, Some(f), &[(**a).clone()])?;
                right_rule(p, 1, Some(f), &[(**b).clone()])
            }
            _ => Err("principal formula is not a conjunction".into()),
        },
        Rule::OrL(f) => match f {
            Formula::Or(a, b) => {
                arity(p, 2)?;
                on_left(c, f)?;
                same_ctx(p, 0)?;
                same_ctx(p, 1)?;
                left_rule(p, 0, Some(f), &[(**a).clone()])?;
                left_rule(p, 1, Some(f), &[(**b).clone()])
            }
            _ => Err("principal formula is not a disjunction".into()),
        },
        Rule::OrR(f) => match f {
            Formula::Or(a, b) => {
                arity(p, 1)?;
                on_right(c, f)?;
                same_ctx(p, 0)?;
                right_rule(p, 0, Some(f), &[(**a).clone(), (**b).clone()])
            }
            _ => Err("principal formula is not a disjunction".into()),
        },
        Rule::ImpliesL(f) => match f {
            Formula::Implies(a, b) => {
                arity(p, 2)?;
                on_left(c, f)?;
                same_ctx(p, 0)?;
                same_ctx(p, 1)?;
                let q0 = &p.premises[0].conclusion;
                ensure(side_ok(&q0.left, &c.left, Some(f), &[]), "premise 0 left side does not match schema")?;
                ensure(q0.right.set_eq(&c.right.with((**a).clone())), "premise 0 right side does not match schema")?;
                left_rule(p, 1, Some(f), &[(**b).clone()])
            }
            _ => Err("principal formula is not an implication".into()),
        },
        Rule::ImpliesR(f) => match f {
            Formula::Implies(a, b) => {
                arity(p, 1)?;
                on_right(c, f)?;
                same_ctx(p, 0)?;
                let q = &p.premises[0].conclusion;
                ensure(q.left.set_eq(&c.left.with((**a).clone())), "premise left side does not match schema")?;
                ensure(side_ok(&q.right, &c.right, Some(f), &[(**b).clone()]), "premise right side does not match schema")
            }
            _ => Err("principal formula is not an implication".into()),
        },
        Rule::ForallL(f, v) | Rule::ExistsR(f, v) => {
            let (x, t, body, is_left) = match (&p.rule, f) {
                (Rule::ForallL(..), Formula::Forall(x, t, b)) => (x, t, b, true),
                (Rule::ExistsR(..), Formula::Exists(x, t, b)) => (x, t, b, false),
                _ => return Err("principal formula has the wrong quantifier".into()),
            };
            arity(p, 1)?;
            ensure(term_has_type(&c.ctx, v, t), format!("instantiation `{v}` does not have type {t}"))?;
            same_ctx(p, 0)?;
            let inst = body.subst(x, v);
            if is_left {
                on_left(c, f)?;
                left_rule(p, 0, Some(f), &[inst])
            } else {
                on_right(c, f)?;
                right_rule(p, 0, Some(f), &[inst])
            }
        }
        Rule::ForallR(f, y) | Rule::ExistsL(f, y) => {
            let (x, t, body, is_left) = match (&p.rule, f) {
                (Rule::ExistsL(..), Formula::Exists(x, t, b)) => (x, t, b, true),
                (Rule::ForallR(..), Formula::Forall(x, t, b)) => (x, t, b, false),
                _ => return Err("principal formula has the wrong quantifier".into()),
            };
            arity(p, 1)?;
            eigen_ok(c, y)?;
            ensure(p.premises[0].conclusion.ctx == c.ctx.with(y.clone(), t.clone()), "premise context must extend the conclusion's with the eigenvariable")?;
            let inst = body.rename(x, y);
            if is_left {
                on_left(c, f)?;
                left_rule(p, 0, Some(f), &[inst])
            } else {
                on_right(c, f)?;
                right_rule(p, 0, Some(f), &[inst])
            }
        }
        Rule::WitnessedWeaken { left, right, var } => {
            let (Formula::Witnessed(pl), Formula::Witnessed(pr)) = (left, right) else {
                return Err("principal formulas must be witnessed formulas".into());
            };
            arity(p, 1)?;
            on_left(c, left)?;
            on_right(c, right)?;
            ensure(!c.left.free_vars().contains(var), format!("{var} ∈ FV(Φ)"))?;
            ensure(!c.right.free_vars().contains(var), format!("{var} ∈ FV(Φ')"))?;
            ensure(!c.ctx.contains(var), format!("`{var}` is already bound in the context"))?;
            let q = &p.premises[0].conclusion;
            ensure(q.ctx == c.ctx.with(var.clone(), ValueType::State), "premise context must extend the conclusion's with the state variable")?;
            ensure(side_ok(&q.left, &c.left, Some(left), &[pl.apply(&ValueTerm::var(var))]), "premise left side does not match schema")?;
            ensure(side_ok(&q.right, &c.right, Some(right), &[pr.apply(&ValueTerm::var(var))]), "premise right side does not match schema")
        }
        Rule::EqRefl(v, t) => {
            arity(p, 1)?;
            ensure(term_has_type(&c.ctx, v, t), format!("`{v}` does not have type {t}"))?;
            same_ctx(p, 0)?;
            left_rule(p, 0, None, &[Formula::eq(t.clone(), v.clone(), v.clone())])
        }
        Rule::EqTransport { eq, from, to } => {
            arity(p, 1)?;
            let (_, a, b) = eq_parts(eq).ok_or("first premise formula is not an equation")?;
            on_left(c, eq)?;
            on_left(c, from)?;
            ensure(from.is_atomic() && to.is_atomic(), "Eq-Transport-SC applies to atomic formulas only")?;
            ensure(atom_transports(from, to, a, b), "result is not obtained by replacing occurrences along the equation")?;
            same_ctx(p, 0)?;
            left_rule(p, 0, None, std::slice::from_ref(to))
        }
        Rule::RelRefl(v) => {
            arity(p, 1)?;
            ensure(term_has_type(&c.ctx, v, &ValueType::State), format!("`{v}` is not a state"))?;
            same_ctx(p, 0)?;
            left_rule(p, 0, None, &[Formula::rel(v.clone(), v.clone())])
        }
        Rule::RelTrans(f, g) => {
            arity(p, 1)?;
            let (a, b) = rel_parts(f).ok_or("first formula is not a rel atom")?;
            let (b2, c2) = rel_parts(g).ok_or("second formula is not a rel atom")?;
            ensure(alpha_eq(b, b2), "middle states differ")?;
            on_left(c, f)?;
            on_left(c, g)?;
            same_ctx(p, 0)?;
            left_rule(p, 0, None, &[Formula::rel(a.clone(), c2.clone())])
        }
        Rule::SumDisjoint(f) => {
            arity(p, 0)?;
            on_left(c, f)?;
            match eq_parts(f) {
                Some((_, ValueTerm::Inl(..), ValueTerm::Inr(..))) => Ok(()),
                _ => Err("formula is not an equation between a left and a right injection".into()),
            }
        }
        Rule::PairInjective(f, i) => {
            arity(p, 1)?;
            on_left(c, f)?;
            let (t, a, b) = eq_parts(f).ok_or("formula is not an equation")?;
            let (ValueType::Prod(t1, t2), ValueTerm::Pair(a1, a2), ValueTerm::Pair(b1, b2)) = (t, a, b) else {
                return Err("formula is not an equation between pairs".into());
            };
            let add = match i {
                0 => Formula::eq((**t1).clone(), (**a1).clone(), (**b1).clone()),
                1 => Formula::eq((**t2).clone(), (**a2).clone(), (**b2).clone()),
                _ => return Err("component index must be 0 or 1".into()),
            };
            same_ctx(p, 0)?;
            left_rule(p, 0, None, &[add])
        }
        Rule::BoolCase(v) => {
            arity(p, 2)?;
            ensure(term_has_type(&c.ctx, v, &ValueType::bool()), format!("`{v}` is not a boolean"))?;
            same_ctx(p, 0)?;
            same_ctx(p, 1)?;
            left_rule(p, 0, None, &[Formula::eq(ValueType::bool(), v.clone(), ValueTerm::ff())])?;
            left_rule(p, 1, None, &[Formula::eq(ValueType::bool(), v.clone(), ValueTerm::tt())])
        }
    }
}
