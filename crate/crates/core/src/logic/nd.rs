//! Natural-deduction derivations, their checker, and the translation from
//! sequent proofs.
//!
//! A derivation node records its context, the hypotheses available at that
//! point, and its conclusion. Premises may use any subset of the
//! conclusion's hypotheses plus those the rule discharges.

use std::fmt::{self, Write};

use crate::ast::*;
use crate::typecheck::TypingContext;

use super::proof::{transports, Proof, Rule};
use super::sequent::FormulaSet;
use super::terms::term_has_type;

#[derive(Clone, Debug, PartialEq)]
pub enum NdRule {
    Hyp,
    TopI,
    BotE,
    AndI,
    /// Projection 0 or 1.
    AndE(usize),
    /// Injection into the left (0) or right (1) disjunct.
    OrI(usize),
    OrE,
    ImpliesI,
    ImpliesE,
    ForallI(Name),
    ForallE(ValueTerm),
    ExistsI(ValueTerm),
    ExistsE(Name),
    /// Reductio: from `Φ, ¬A ⊢ ⊥` conclude `A`.
    Raa,
    WitnessedWeaken(Name),
    EqRefl,
    /// `pattern[from/var]` and `from == to` give `pattern[to/var]`.
    EqTransport { var: Name, pattern: Formula, from: ValueTerm, to: ValueTerm },
    RelRefl,
    RelTrans,
    SumDisjoint,
    PairInjective(usize),
    BoolCase(ValueTerm),
}

impl NdRule {
    pub fn name(&self) -> &'static str {
        match self {
            NdRule::Hyp => "Hyp",
            NdRule::TopI => "Top-I",
            NdRule::BotE => "Bot-E",
            NdRule::AndI => "And-I",
            NdRule::AndE(_) => "And-E",
            NdRule::OrI(_) => "Or-I",
            NdRule::OrE => "Or-E",
            NdRule::ImpliesI => "Implies-I",
            NdRule::ImpliesE => "Implies-E",
            NdRule::ForallI(_) => "Forall-I",
            NdRule::ForallE(_) => "Forall-E",
            NdRule::ExistsI(_) => "Exists-I",
            NdRule::ExistsE(_) => "Exists-E",
            NdRule::Raa => "RAA",
            NdRule::WitnessedWeaken(_) => "Witnessed-Weaken",
            NdRule::EqRefl => "Eq-Refl",
            NdRule::EqTransport { .. } => "Eq-Transport",
            NdRule::RelRefl => "Rel-Refl",
            NdRule::RelTrans => "Rel-Trans",
            NdRule::SumDisjoint => "Sum-Disjoint",
            NdRule::PairInjective(_) => "Pair-Injective",
            NdRule::BoolCase(_) => "Bool-Case",
        }
    }

    fn is_eigen(&self) -> bool {
        matches!(self, NdRule::ForallI(_) | NdRule::ExistsE(_) | NdRule::WitnessedWeaken(_))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NdDerivation {
    pub rule: NdRule,
    pub ctx: TypingContext,
    pub hyps: FormulaSet,
    pub conclusion: Formula,
    pub premises: Vec<NdDerivation>,
}

impl NdDerivation {
    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(NdDerivation::size).sum::<usize>()
    }

    pub fn uses(&self, rule: &str) -> bool {
        self.rule.name() == rule || self.premises.iter().any(|p| p.uses(rule))
    }

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

    fn uses_hyp(&self, f: &Formula) -> bool {
        (self.rule == NdRule::Hyp && alpha_eq(&self.conclusion, f)) || self.premises.iter().any(|p| p.uses_hyp(f))
    }

    fn has_eigen(&self) -> bool {
        self.rule.is_eigen() || self.premises.iter().any(NdDerivation::has_eigen)
    }

    /// Whether some node discharges `f` for one of its premises.
    fn discharges(&self, f: &Formula) -> bool {
        (0..self.premises.len()).any(|i| discharged(self, i).iter().any(|g| alpha_eq(g, f)))
            || self.premises.iter().any(|p| p.discharges(f))
    }
}

impl fmt::Display for NdDerivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Hypotheses rule `d` makes available to premise `i`.
fn discharged(d: &NdDerivation, i: usize) -> Vec<Formula> {
    match (&d.rule, i) {
        (NdRule::ImpliesI, 0) => match &d.conclusion {
            Formula::Implies(a, _) => vec![(**a).clone()],
            _ => vec![],
        },
        (NdRule::Raa, 0) => vec![Formula::not(d.conclusion.clone())],
        (NdRule::OrE, 1 | 2) => match d.premises.first().map(|p| &p.conclusion) {
            Some(Formula::Or(a, b)) => vec![if i == 1 { (**a).clone() } else { (**b).clone() }],
            _ => vec![],
        },
        (NdRule::ExistsE(y), 1) => match d.premises.first().map(|p| &p.conclusion) {
            Some(Formula::Exists(x, _, body)) => vec![body.rename(x, y)],
            _ => vec![],
        },
        (NdRule::BoolCase(v), 0) => vec![Formula::eq(ValueType::bool(), v.clone(), ValueTerm::ff())],
        (NdRule::BoolCase(v), 1) => vec![Formula::eq(ValueType::bool(), v.clone(), ValueTerm::tt())],
        _ => vec![],
    }
}

/// Context rule `d` gives premise `i`.
fn premise_ctx(d: &NdDerivation, i: usize) -> TypingContext {
    match (&d.rule, i) {
        (NdRule::ForallI(y), 0) => match &d.conclusion {
            Formula::Forall(_, t, _) => d.ctx.with(y.clone(), t.clone()),
            _ => d.ctx.clone(),
        },
        (NdRule::ExistsE(y), 1) => match d.premises.first().map(|p| &p.conclusion) {
            Some(Formula::Exists(_, t, _)) => d.ctx.with(y.clone(), t.clone()),
            _ => d.ctx.clone(),
        },
        (NdRule::WitnessedWeaken(s), 0) => d.ctx.with(s.clone(), ValueType::State),
        _ => d.ctx.clone(),
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("at {}: {rule}: {message}", if path.is_empty() { "root".to_string() } else { path.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".") })]
pub struct NdError {
    pub path: Vec<usize>,
    pub rule: &'static str,
    pub message: String,
}

pub fn check_nd(d: &NdDerivation) -> Result<(), NdError> {
    fn rec(d: &NdDerivation, path: &mut Vec<usize>) -> Result<(), NdError> {
        check_node(d).map_err(|message| NdError { path: path.clone(), rule: d.rule.name(), message })?;
        for (i, p) in d.premises.iter().enumerate() {
            path.push(i);
            rec(p, path)?;
            path.pop();
        }
        Ok(())
    }
    rec(d, &mut Vec::new())
}

type Check = Result<(), String>;

fn ensure(c: bool, msg: impl Into<String>) -> Check {
    if c {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn concl(d: &NdDerivation, i: usize) -> &Formula {
    &d.premises[i].conclusion
}

fn check_node(d: &NdDerivation) -> Check {
    let n = match &d.rule {
        NdRule::Hyp | NdRule::TopI | NdRule::EqRefl | NdRule::RelRefl => 0,
        NdRule::BotE
        | NdRule::AndE(_)
        | NdRule::OrI(_)
        | NdRule::ImpliesI
        | NdRule::ForallI(_)
        | NdRule::ForallE(_)
        | NdRule::ExistsI(_)
        | NdRule::Raa
        | NdRule::WitnessedWeaken(_)
        | NdRule::SumDisjoint
        | NdRule::PairInjective(_) => 1,
        NdRule::AndI | NdRule::ImpliesE | NdRule::ExistsE(_) | NdRule::RelTrans | NdRule::BoolCase(_) => 2,
        NdRule::EqTransport { .. } => 2,
        NdRule::OrE => 3,
    };
    ensure(d.premises.len() == n, format!("expected {n} premise(s), found {}", d.premises.len()))?;
    for (i, p) in d.premises.iter().enumerate() {
        ensure(p.ctx == premise_ctx(d, i), format!("premise {i} has the wrong context"))?;
        let allowed = d.hyps.with_all(discharged(d, i));
        ensure(p.hyps.is_subset(&allowed), format!("premise {i} uses hypotheses not available here"))?;
    }
    let c = &d.conclusion;
    match &d.rule {
        NdRule::Hyp => ensure(d.hyps.contains(c), "conclusion is not a hypothesis"),
        NdRule::TopI => ensure(*c == Formula::Top, "conclusion must be ⊤"),
        NdRule::BotE => ensure(*concl(d, 0) == Formula::Bot, "premise must conclude ⊥"),
        NdRule::AndI => match c {
            Formula::And(a, b) => ensure(alpha_eq(concl(d, 0), a.as_ref()) && alpha_eq(concl(d, 1), b.as_ref()), "premises do not match the conjuncts"),
            _ => Err("conclusion is not a conjunction".into()),
        },
        NdRule::AndE(i) => match concl(d, 0) {
            Formula::And(a, b) => ensure(alpha_eq(c, if *i == 0 { a } else { b }), "conclusion is not the projected conjunct"),
            _ => Err("premise is not a conjunction".into()),
        },
        NdRule::OrI(i) => match c {
            Formula::Or(a, b) => ensure(alpha_eq(concl(d, 0), if *i == 0 { a } else { b }), "premise is not the injected disjunct"),
            _ => Err("conclusion is not a disjunction".into()),
        },
        NdRule::OrE => {
            ensure(matches!(concl(d, 0), Formula::Or(..)), "first premise is not a disjunction")?;
            ensure(alpha_eq(concl(d, 1), c) && alpha_eq(concl(d, 2), c), "case premises must conclude the conclusion")
        }
        NdRule::ImpliesI => match c {
            Formula::Implies(_, b) => ensure(alpha_eq(concl(d, 0), b.as_ref()), "premise is not the consequent"),
            _ => Err("conclusion is not an implication".into()),
        },
        NdRule::ImpliesE => match concl(d, 0) {
            Formula::Implies(a, b) => {
                ensure(alpha_eq(concl(d, 1), a.as_ref()), "argument does not match the antecedent")?;
                ensure(alpha_eq(c, b.as_ref()), "conclusion is not the consequent")
            }
            _ => Err("first premise is not an implication".into()),
        },
        NdRule::ForallI(y) => match c {
            Formula::Forall(x, _, body) => {
                ensure(!d.ctx.contains(y), format!("eigenvariable `{y}` is not fresh"))?;
                ensure(!d.premises[0].hyps.free_vars().contains(y), format!("{y} ∈ FV(Φ)"))?;
                ensure(alpha_eq(concl(d, 0), &body.rename(x, y)), "premise is not the instantiated body")
            }
            _ => Err("conclusion is not a universal".into()),
        },
        NdRule::ForallE(v) => match concl(d, 0) {
            Formula::Forall(x, t, body) => {
                ensure(term_has_type(&d.ctx, v, t), format!("`{v}` does not have type {t}"))?;
                ensure(alpha_eq(c, &body.subst(x, v)), "conclusion is not the instance")
            }
            _ => Err("premise is not a universal".into()),
        },
        NdRule::ExistsI(v) => match c {
            Formula::Exists(x, t, body) => {
                ensure(term_has_type(&d.ctx, v, t), format!("`{v}` does not have type {t}"))?;
                ensure(alpha_eq(concl(d, 0), &body.subst(x, v)), "premise is not the instance")
            }
            _ => Err("conclusion is not an existential".into()),
        },
        NdRule::ExistsE(y) => {
            ensure(matches!(concl(d, 0), Formula::Exists(..)), "first premise is not an existential")?;
            ensure(!d.ctx.contains(y), format!("eigenvariable `{y}` is not fresh"))?;
            ensure(!c.free_vars().contains(y), format!("eigenvariable `{y}` escapes into the conclusion"))?;
            ensure(!d.hyps.free_vars().contains(y), format!("{y} ∈ FV(Φ)"))?;
            ensure(alpha_eq(concl(d, 1), c), "second premise must conclude the conclusion")
        }
        NdRule::Raa => ensure(*concl(d, 0) == Formula::Bot, "premise must conclude ⊥"),
        NdRule::WitnessedWeaken(s) => match c {
            Formula::Implies(a, b) => match (a.as_ref(), b.as_ref()) {
                (Formula::Witnessed(p), Formula::Witnessed(q)) => {
                    ensure(!d.ctx.contains(s), format!("`{s}` is already bound in the context"))?;
                    ensure(!d.premises[0].hyps.free_vars().contains(s), format!("{s} ∈ FV(Φ)"))?;
                    let sv = ValueTerm::var(s);
                    ensure(alpha_eq(concl(d, 0), &Formula::implies(p.apply(&sv), q.apply(&sv))), "premise is not the instantiated implication")
                }
                _ => Err("conclusion must relate two witnessed formulas".into()),
            },
            _ => Err("conclusion is not an implication".into()),
        },
        NdRule::EqRefl => match c {
            Formula::Atom(AtomHead::Eq(t), args) if args.len() == 2 => {
                ensure(alpha_eq(&args[0], &args[1]), "sides differ")?;
                ensure(term_has_type(&d.ctx, &args[0], t), "term does not have the equation's type")
            }
            _ => Err("conclusion is not an equation".into()),
        },
        NdRule::EqTransport { var, pattern, from, to } => {
            let Formula::Atom(AtomHead::Eq(_), args) = concl(d, 0) else {
                return Err("first premise is not an equation".into());
            };
            ensure(args.len() == 2 && alpha_eq(&args[0], from) && alpha_eq(&args[1], to), "equation does not match the rewrite")?;
            ensure(alpha_eq(concl(d, 1), &pattern.subst(var, from)), "second premise is not the pattern at the old term")?;
            ensure(alpha_eq(c, &pattern.subst(var, to)), "conclusion is not the pattern at the new term")
        }
        NdRule::RelRefl => match c {
            Formula::Atom(AtomHead::Rel, args) if args.len() == 2 => {
                ensure(alpha_eq(&args[0], &args[1]), "sides differ")?;
                ensure(term_has_type(&d.ctx, &args[0], &ValueType::State), "term is not a state")
            }
            _ => Err("conclusion is not a rel atom".into()),
        },
        NdRule::RelTrans => match (concl(d, 0), concl(d, 1), c) {
            (Formula::Atom(AtomHead::Rel, p), Formula::Atom(AtomHead::Rel, q), Formula::Atom(AtomHead::Rel, r))
                if p.len() == 2 && q.len() == 2 && r.len() == 2 =>
            {
                ensure(alpha_eq(&p[1], &q[0]) && alpha_eq(&p[0], &r[0]) && alpha_eq(&q[1], &r[1]), "states do not chain")
            }
            _ => Err("premises and conclusion must be rel atoms".into()),
        },
        NdRule::SumDisjoint => {
            ensure(*c == Formula::Bot, "conclusion must be ⊥")?;
            match concl(d, 0) {
                Formula::Atom(AtomHead::Eq(_), args) if args.len() == 2 => ensure(
                    matches!((&args[0], &args[1]), (ValueTerm::Inl(..), ValueTerm::Inr(..))),
                    "premise is not an equation between a left and a right injection",
                ),
                _ => Err("premise is not an equation".into()),
            }
        }
        NdRule::PairInjective(i) => match concl(d, 0) {
            Formula::Atom(AtomHead::Eq(ValueType::Prod(t1, t2)), args) if args.len() == 2 => match (&args[0], &args[1]) {
                (ValueTerm::Pair(a1, a2), ValueTerm::Pair(b1, b2)) => {
                    let want = if *i == 0 {
                        Formula::eq((**t1).clone(), (**a1).clone(), (**b1).clone())
                    } else {
                        Formula::eq((**t2).clone(), (**a2).clone(), (**b2).clone())
                    };
                    ensure(alpha_eq(c, &want), "conclusion is not the component equation")
                }
                _ => Err("premise is not an equation between pairs".into()),
            },
            _ => Err("premise is not a product equation".into()),
        },
        NdRule::BoolCase(v) => {
            ensure(term_has_type(&d.ctx, v, &ValueType::bool()), format!("`{v}` is not a boolean"))?;
            ensure(alpha_eq(concl(d, 0), c) && alpha_eq(concl(d, 1), c), "cases must conclude the conclusion")
        }
    }
}

// ---- construction -----------------------------------------------------------

fn node(rule: NdRule, ctx: &TypingContext, conclusion: Formula, premises: Vec<NdDerivation>) -> NdDerivation {
    // Hypotheses are filled in by `rehyp` once the tree is complete.
    NdDerivation { rule, ctx: ctx.clone(), hyps: FormulaSet::new(), conclusion, premises }
}

fn hyp(ctx: &TypingContext, f: &Formula) -> NdDerivation {
    node(NdRule::Hyp, ctx, f.clone(), vec![])
}

fn imp_e(ctx: &TypingContext, f: NdDerivation, a: NdDerivation) -> NdDerivation {
    let c = match &f.conclusion {
        Formula::Implies(_, b) => (**b).clone(),
        _ => Formula::Bot,
    };
    node(NdRule::ImpliesE, ctx, c, vec![f, a])
}

fn imp_i(ctx: &TypingContext, a: &Formula, d: NdDerivation) -> NdDerivation {
    let c = Formula::implies(a.clone(), d.conclusion.clone());
    node(NdRule::ImpliesI, ctx, c, vec![d])
}

fn raa(ctx: &TypingContext, a: &Formula, d: NdDerivation) -> NdDerivation {
    node(NdRule::Raa, ctx, a.clone(), vec![d])
}

/// Uses `proof` of `a` to discharge hypothesis `a` of `d`.
fn discharge(ctx: &TypingContext, a: &Formula, d: NdDerivation, proof: NdDerivation) -> NdDerivation {
    imp_e(ctx, imp_i(ctx, a, d), proof)
}

/// `¬a` from `¬(... a ...)` where `a` is reachable by `intro` inside.
fn neg_from(ctx: &TypingContext, neg_whole: &Formula, a: &Formula, intro: impl FnOnce(NdDerivation) -> NdDerivation) -> NdDerivation {
    imp_i(ctx, a, imp_e(ctx, hyp(ctx, neg_whole), intro(hyp(ctx, a))))
}

fn eq_sides(f: &Formula) -> Option<(&ValueTerm, &ValueTerm)> {
    match f {
        Formula::Atom(AtomHead::Eq(_), args) if args.len() == 2 => Some((&args[0], &args[1])),
        _ => None,
    }
}

/// Pattern with `x` at the positions where `from` has `a` and `to` has `b`.
fn value_pattern(from: &ValueTerm, to: &ValueTerm, a: &ValueTerm, b: &ValueTerm, x: &str) -> ValueTerm {
    if alpha_eq(from, to) {
        return from.clone();
    }
    if alpha_eq(from, a) && alpha_eq(to, b) {
        return ValueTerm::var(x);
    }
    match (from, to) {
        (ValueTerm::Pair(f1, f2), ValueTerm::Pair(t1, t2)) => {
            ValueTerm::pair(value_pattern(f1, t1, a, b, x), value_pattern(f2, t2, a, b, x))
        }
        (ValueTerm::Inl(f1, t), ValueTerm::Inl(t1, _)) => ValueTerm::inl(value_pattern(f1, t1, a, b, x), t.clone()),
        (ValueTerm::Inr(f1, t), ValueTerm::Inr(t1, _)) => ValueTerm::inr(value_pattern(f1, t1, a, b, x), t.clone()),
        (ValueTerm::Prim(p, f1), ValueTerm::Prim(_, t1)) => ValueTerm::prim(p.clone(), value_pattern(f1, t1, a, b, x)),
        _ => from.clone(),
    }
}

fn transport_nd(ctx: &TypingContext, eq: &Formula, from: &Formula, to: &Formula) -> NdDerivation {
    let (a, b) = eq_sides(eq).expect("transport along an equation");
    let mut taken = eq.free_vars();
    taken.extend(from.free_vars());
    taken.extend(to.free_vars());
    taken.extend(ctx.all_names());
    let x = fresh_name("z", |c| taken.contains(c));
    let pattern = match (from, to) {
        (Formula::Atom(h, fs), Formula::Atom(_, ts)) => {
            debug_assert!(fs.iter().zip(ts).all(|(f, t)| transports(f, t, a, b)));
            Formula::Atom(h.clone(), fs.iter().zip(ts).map(|(f, t)| value_pattern(f, t, a, b, &x)).collect())
        }
        _ => from.clone(),
    };
    let rule = NdRule::EqTransport { var: x, pattern, from: a.clone(), to: b.clone() };
    node(rule, ctx, to.clone(), vec![hyp(ctx, eq), hyp(ctx, from)])
}

/// Derivation of `⊥` from the left formulas and the negated right formulas
/// of `p`'s conclusion.
fn refute(p: &Proof) -> NdDerivation {
    let c = &p.conclusion;
    let ctx = &c.ctx;
    let sub = |i: usize| refute(&p.premises[i]);
    let not = |f: &Formula| Formula::not(f.clone());
    match &p.rule {
        Rule::Ax(a) => imp_e(ctx, hyp(ctx, &not(a)), hyp(ctx, a)),
        Rule::BotL => hyp(ctx, &Formula::Bot),
        Rule::TopR => imp_e(ctx, hyp(ctx, &not(&Formula::Top)), node(NdRule::TopI, ctx, Formula::Top, vec![])),
        Rule::AndL(f) => {
            let Formula::And(a, b) = f else { unreachable!() };
            let d = imp_i(ctx, a, imp_i(ctx, b, sub(0)));
            let pa = node(NdRule::AndE(0), ctx, (**a).clone(), vec![hyp(ctx, f)]);
            let pb = node(NdRule::AndE(1), ctx, (**b).clone(), vec![hyp(ctx, f)]);
            imp_e(ctx, imp_e(ctx, d, pa), pb)
        }
        Rule::AndR(f) => {
            let Formula::And(a, b) = f else { unreachable!() };
            let pa = raa(ctx, a, sub(0));
            let pb = raa(ctx, b, sub(1));
            imp_e(ctx, hyp(ctx, &not(f)), node(NdRule::AndI, ctx, f.clone(), vec![pa, pb]))
        }
        Rule::OrL(f) => node(NdRule::OrE, ctx, Formula::Bot, vec![hyp(ctx, f), sub(0), sub(1)]),
        Rule::OrR(f) => {
            let Formula::Or(a, b) = f else { unreachable!() };
            let na = neg_from(ctx, &not(f), a, |h| node(NdRule::OrI(0), ctx, f.clone(), vec![h]));
            let nb = neg_from(ctx, &not(f), b, |h| node(NdRule::OrI(1), ctx, f.clone(), vec![h]));
            discharge(ctx, &not(a), discharge(ctx, &not(b), sub(0), nb), na)
        }
        Rule::ImpliesL(f) => {
            let Formula::Implies(a, b) = f else { unreachable!() };
            let pa = raa(ctx, a, sub(0));
            let pb = imp_e(ctx, hyp(ctx, f), pa);
            discharge(ctx, b, sub(1), pb)
        }
        Rule::ImpliesR(f) => {
            let Formula::Implies(a, b) = f else { unreachable!() };
            let pb = raa(ctx, b, sub(0));
            imp_e(ctx, hyp(ctx, &not(f)), imp_i(ctx, a, pb))
        }
        Rule::ForallL(f, v) => {
            let Formula::Forall(x, _, body) = f else { unreachable!() };
            let inst = body.subst(x, v);
            let pf = node(NdRule::ForallE(v.clone()), ctx, inst.clone(), vec![hyp(ctx, f)]);
            discharge(ctx, &inst, sub(0), pf)
        }
        Rule::ExistsR(f, v) => {
            let Formula::Exists(x, _, body) = f else { unreachable!() };
            let inst = body.subst(x, v);
            let ni = neg_from(ctx, &not(f), &inst, |h| node(NdRule::ExistsI(v.clone()), ctx, f.clone(), vec![h]));
            discharge(ctx, &not(&inst), sub(0), ni)
        }
        Rule::ForallR(f, y) => {
            let Formula::Forall(x, t, body) = f else { unreachable!() };
            let inner_ctx = ctx.with(y.clone(), t.clone());
            let inst = body.rename(x, y);
            let pa = raa(&inner_ctx, &inst, sub(0));
            let all = node(NdRule::ForallI(y.clone()), ctx, f.clone(), vec![pa]);
            imp_e(ctx, hyp(ctx, &not(f)), all)
        }
        Rule::ExistsL(f, y) => node(NdRule::ExistsE(y.clone()), ctx, Formula::Bot, vec![hyp(ctx, f), sub(0)]),
        Rule::WitnessedWeaken { left, right, var } => {
            let (Formula::Witnessed(pl), Formula::Witnessed(pr)) = (left, right) else { unreachable!() };
            let inner_ctx = ctx.with(var.clone(), ValueType::State);
            let sv = ValueTerm::var(var);
            let (phi, psi) = (pl.apply(&sv), pr.apply(&sv));
            let imp = imp_i(&inner_ctx, &phi, raa(&inner_ctx, &psi, sub(0)));
            let ww = node(NdRule::WitnessedWeaken(var.clone()), ctx, Formula::implies(left.clone(), right.clone()), vec![imp]);
            imp_e(ctx, hyp(ctx, &not(right)), imp_e(ctx, ww, hyp(ctx, left)))
        }
        Rule::EqRefl(v, t) => {
            let f = Formula::eq(t.clone(), v.clone(), v.clone());
            discharge(ctx, &f, sub(0), node(NdRule::EqRefl, ctx, f.clone(), vec![]))
        }
        Rule::EqTransport { eq, from, to } => discharge(ctx, to, sub(0), transport_nd(ctx, eq, from, to)),
        Rule::RelRefl(v) => {
            let f = Formula::rel(v.clone(), v.clone());
            discharge(ctx, &f, sub(0), node(NdRule::RelRefl, ctx, f.clone(), vec![]))
        }
        Rule::RelTrans(f, g) => {
            let (Formula::Atom(_, a), Formula::Atom(_, b)) = (f, g) else { unreachable!() };
            let r = Formula::rel(a[0].clone(), b[1].clone());
            discharge(ctx, &r, sub(0), node(NdRule::RelTrans, ctx, r.clone(), vec![hyp(ctx, f), hyp(ctx, g)]))
        }
        Rule::SumDisjoint(f) => node(NdRule::SumDisjoint, ctx, Formula::Bot, vec![hyp(ctx, f)]),
        Rule::PairInjective(f, i) => {
            let added = p.premises[0].conclusion.left.iter().find(|g| !c.left.contains(g)).cloned();
            let Some(e) = added.or_else(|| pair_component(f, *i)) else { unreachable!() };
            discharge(ctx, &e, sub(0), node(NdRule::PairInjective(*i), ctx, e.clone(), vec![hyp(ctx, f)]))
        }
        Rule::BoolCase(v) => node(NdRule::BoolCase(v.clone()), ctx, Formula::Bot, vec![sub(0), sub(1)]),
    }
}

fn pair_component(f: &Formula, i: usize) -> Option<Formula> {
    match f {
        Formula::Atom(AtomHead::Eq(ValueType::Prod(t1, t2)), args) if args.len() == 2 => match (&args[0], &args[1]) {
            (ValueTerm::Pair(a1, a2), ValueTerm::Pair(b1, b2)) => Some(if i == 0 {
                Formula::eq((**t1).clone(), (**a1).clone(), (**b1).clone())
            } else {
                Formula::eq((**t2).clone(), (**a2).clone(), (**b2).clone())
            }),
            _ => None,
        },
        _ => None,
    }
}

/// Derivation of `ψ_i ⊢ ψ_1 ∨ ... ∨ ψ_n` (right-nested) from hypothesis `ψ_i`.
fn inject(ctx: &TypingContext, parts: &[Formula], i: usize) -> NdDerivation {
    if parts.len() == 1 {
        return hyp(ctx, &parts[0]);
    }
    let whole = Formula::disj(parts.to_vec());
    if i == 0 {
        node(NdRule::OrI(0), ctx, whole, vec![hyp(ctx, &parts[0])])
    } else {
        node(NdRule::OrI(1), ctx, whole, vec![inject(ctx, &parts[1..], i - 1)])
    }
}

/// Translates a sequent proof of `Γ | Φ ⊢ Φ'` into a natural-deduction
/// derivation of `Γ | Φ ⊢ ⋁Φ'`.
pub fn sc_to_nd(p: &Proof) -> NdDerivation {
    let c = &p.conclusion;
    let ctx = &c.ctx;
    let body = refute(p);
    let rights = c.right.to_vec();
    let d = if rights.is_empty() {
        body
    } else {
        let goal = Formula::disj(rights.clone());
        let neg_goal = Formula::not(goal.clone());
        let mut d = body;
        for (i, psi) in rights.iter().enumerate() {
            let n = Formula::not(psi.clone());
            if alpha_eq(&n, &neg_goal) {
                continue;
            }
            let proof = imp_i(ctx, psi, imp_e(ctx, hyp(ctx, &neg_goal), inject(ctx, &rights, i)));
            d = discharge(ctx, &n, d, proof);
        }
        raa(ctx, &goal, d)
    };
    let mut d = simplify(d);
    rehyp(&mut d, c.left.clone());
    d
}

// ---- normalisation -------------------------------------------------------------

/// Replaces hypothesis leaves `a` with `e` (contexts are re-propagated by
/// `rehyp`).
fn replace_hyp(d: NdDerivation, a: &Formula, e: &NdDerivation) -> NdDerivation {
    if d.rule == NdRule::Hyp && alpha_eq(&d.conclusion, a) {
        return e.clone();
    }
    NdDerivation { premises: d.premises.into_iter().map(|p| replace_hyp(p, a, e)).collect(), ..d }
}

/// Removes the detours introduced by the refutation translation:
/// `⇒E(⇒I_A(D), E)` becomes `D[E/A]`, and `RAA_A(⇒E(¬A, D))` becomes `D`
/// when `D` does not use `¬A`.
fn simplify(d: NdDerivation) -> NdDerivation {
    let d = NdDerivation { premises: d.premises.into_iter().map(simplify).collect(), ..d };
    match d.rule {
        NdRule::ImpliesE if d.premises[0].rule == NdRule::ImpliesI => {
            let Formula::Implies(a, _) = &d.premises[0].conclusion else { return d };
            let a = (**a).clone();
            let inner = &d.premises[0].premises[0];
            let e = &d.premises[1];
            let uses = inner.uses_hyp(&a);
            if inner.discharges(&a) || (uses && e.has_eigen()) {
                return d;
            }
            let mut ps = d.premises;
            let e = ps.pop().unwrap();
            let inner = ps.pop().unwrap().premises.pop().unwrap();
            simplify(replace_hyp(inner, &a, &e))
        }
        NdRule::Raa => {
            let body = &d.premises[0];
            let neg = Formula::not(d.conclusion.clone());
            if body.rule == NdRule::ImpliesE
                && body.premises[0].rule == NdRule::Hyp
                && alpha_eq(&body.premises[0].conclusion, &neg)
                && alpha_eq(&body.premises[1].conclusion, &d.conclusion)
                && !body.premises[1].uses_hyp(&neg)
            {
                let mut d = d;
                return d.premises.pop().unwrap().premises.pop().unwrap();
            }
            d
        }
        _ => d,
    }
}

/// Recomputes contexts and hypotheses top-down from the root.
fn rehyp(d: &mut NdDerivation, hyps: FormulaSet) {
    d.hyps = hyps;
    for i in 0..d.premises.len() {
        let h = d.hyps.with_all(discharged(d, i));
        let ctx = premise_ctx(d, i);
        d.premises[i].ctx = ctx;
        rehyp(&mut d.premises[i], h);
    }
}
