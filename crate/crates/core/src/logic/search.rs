//! Bounded backward proof search for the cut-free sequent calculus.
//!
//! Invertible rules are applied eagerly and do not consume depth. At the
//! remaining nodes the atomic engine tries to close the branch; failing
//! that, the depth-consuming rules (quantifier instantiation on the left of
//! `∀` / right of `∃`, witnessed weakening, boolean case split) are tried
//! under iterative deepening.

use thiserror::Error;

use crate::ast::*;

use super::atomic::close_atomic;
use super::proof::{Proof, Rule};
use super::sequent::Sequent;
use super::terms::{ground_subterms, term_type};

pub const DEFAULT_NODE_BUDGET: usize = 200_000;

#[derive(Clone, Debug)]
pub struct ProverConfig {
    pub max_depth: usize,
    /// Total search nodes across all deepening rounds before giving up
    /// with a resource error.
    pub node_budget: usize,
    /// Extra state terms offered as quantifier instantiations.
    pub constants: Vec<ValueTerm>,
    /// Instantiations per quantified formula per branch.
    pub instantiations: usize,
    /// Candidate terms considered per instantiation step.
    pub max_candidates: usize,
}

impl ProverConfig {
    pub fn with_depth(max_depth: usize) -> Self {
        ProverConfig { max_depth, ..ProverConfig::default() }
    }
}

impl Default for ProverConfig {
    fn default() -> Self {
        ProverConfig {
            max_depth: 8,
            node_budget: DEFAULT_NODE_BUDGET,
            constants: Vec::new(),
            instantiations: 3,
            max_candidates: 6,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProveOutcome {
    Proved(Proof),
    /// Search to the given depth found nothing; not a disproof.
    Unknown(usize),
}

impl ProveOutcome {
    pub fn is_proved(&self) -> bool {
        matches!(self, ProveOutcome::Proved(_))
    }

    pub fn proof(&self) -> Option<&Proof> {
        match self {
            ProveOutcome::Proved(p) => Some(p),
            ProveOutcome::Unknown(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ProverError {
    #[error("prover node budget of {0} exhausted")]
    Budget(usize),
}

pub fn sc_prove(goal: &Sequent, max_depth: usize) -> Result<ProveOutcome, ProverError> {
    sc_prove_with(goal, &ProverConfig::with_depth(max_depth))
}

pub fn sc_prove_with(goal: &Sequent, cfg: &ProverConfig) -> Result<ProveOutcome, ProverError> {
    let mut s = Search { cfg, nodes: 0 };
    for d in 0..=cfg.max_depth {
        if let Some(p) = s.prove(goal, d, &Vec::new())? {
            return Ok(ProveOutcome::Proved(p));
        }
    }
    Ok(ProveOutcome::Unknown(cfg.max_depth))
}

/// Instantiations already made on the current branch.
type Used = Vec<(Formula, ValueTerm)>;

struct Search<'c> {
    cfg: &'c ProverConfig,
    nodes: usize,
}

fn seq(ctx: &crate::typecheck::TypingContext, left: super::FormulaSet, right: super::FormulaSet) -> Sequent {
    Sequent::new(ctx.clone(), left, right)
}

impl Search<'_> {
    fn prove(&mut self, s: &Sequent, depth: usize, used: &Used) -> Result<Option<Proof>, ProverError> {
        self.nodes += 1;
        if self.nodes > self.cfg.node_budget {
            return Err(ProverError::Budget(self.cfg.node_budget));
        }
        if let Some(f) = s.left.iter().find(|f| s.right.contains(f)) {
            return Ok(Some(Proof::new(Rule::Ax(f.clone()), s.clone(), vec![])));
        }
        if s.left.contains(&Formula::Bot) {
            return Ok(Some(Proof::new(Rule::BotL, s.clone(), vec![])));
        }
        if s.right.contains(&Formula::Top) {
            return Ok(Some(Proof::new(Rule::TopR, s.clone(), vec![])));
        }
        if let Some(r) = self.invertible(s, depth, used)? {
            return Ok(r);
        }
        if let Some(p) = close_atomic(s) {
            return Ok(Some(p));
        }
        if depth == 0 {
            return Ok(None);
        }
        self.counted(s, depth - 1, used)
    }

    /// Applies the first applicable invertible rule. `Some(None)` means the
    /// rule applied and a premise failed, so the sequent fails at this depth.
    fn invertible(&mut self, s: &Sequent, depth: usize, used: &Used) -> Result<Option<Option<Proof>>, ProverError> {
        let ctx = &s.ctx;
        // Single-premise rules first.
        for f in s.left.iter() {
            match f {
                Formula::And(a, b) => {
                    let p = seq(ctx, s.left.without(f).with((**a).clone()).with((**b).clone()), s.right.clone());
                    return self.unary(Rule::AndL(f.clone()), s, p, depth, used).map(Some);
                }
                Formula::Exists(x, t, body) => {
                    let y = s.fresh(x);
                    let p = Sequent::new(ctx.with(y.clone(), t.clone()), s.left.without(f).with(body.rename(x, &y)), s.right.clone());
                    return self.unary(Rule::ExistsL(f.clone(), y), s, p, depth, used).map(Some);
                }
                _ => {}
            }
        }
        for f in s.right.iter() {
            match f {
                Formula::Or(a, b) => {
                    let p = seq(ctx, s.left.clone(), s.right.without(f).with((**a).clone()).with((**b).clone()));
                    return self.unary(Rule::OrR(f.clone()), s, p, depth, used).map(Some);
                }
                Formula::Implies(a, b) => {
                    let p = seq(ctx, s.left.with((**a).clone()), s.right.without(f).with((**b).clone()));
                    return self.unary(Rule::ImpliesR(f.clone()), s, p, depth, used).map(Some);
                }
                Formula::Forall(x, t, body) => {
                    let y = s.fresh(x);
                    let p = Sequent::new(ctx.with(y.clone(), t.clone()), s.left.clone(), s.right.without(f).with(body.rename(x, &y)));
                    return self.unary(Rule::ForallR(f.clone(), y), s, p, depth, used).map(Some);
                }
                _ => {}
            }
        }
        // Branching rules.
        for f in s.left.iter() {
            match f {
                Formula::Or(a, b) => {
                    let p1 = seq(ctx, s.left.without(f).with((**a).clone()), s.right.clone());
                    let p2 = seq(ctx, s.left.without(f).with((**b).clone()), s.right.clone());
                    return self.binary(Rule::OrL(f.clone()), s, p1, p2, depth, used).map(Some);
                }
                Formula::Implies(a, b) => {
                    let p1 = seq(ctx, s.left.without(f), s.right.with((**a).clone()));
                    let p2 = seq(ctx, s.left.without(f).with((**b).clone()), s.right.clone());
                    return self.binary(Rule::ImpliesL(f.clone()), s, p1, p2, depth, used).map(Some);
                }
                _ => {}
            }
        }
        for f in s.right.iter() {
            if let Formula::And(a, b) = f {
                let p1 = seq(ctx, s.left.clone(), s.right.without(f).with((**a).clone()));
                let p2 = seq(ctx, s.left.clone(), s.right.without(f).with((**b).clone()));
                return self.binary(Rule::AndR(f.clone()), s, p1, p2, depth, used).map(Some);
            }
        }
        Ok(None)
    }

    fn unary(&mut self, rule: Rule, s: &Sequent, p: Sequent, depth: usize, used: &Used) -> Result<Option<Proof>, ProverError> {
        Ok(self.prove(&p, depth, used)?.map(|q| Proof::new(rule, s.clone(), vec![q])))
    }

    fn binary(
        &mut self,
        rule: Rule,
        s: &Sequent,
        p1: Sequent,
        p2: Sequent,
        depth: usize,
        used: &Used,
    ) -> Result<Option<Proof>, ProverError> {
        let Some(q1) = self.prove(&p1, depth, used)? else { return Ok(None) };
        let Some(q2) = self.prove(&p2, depth, used)? else { return Ok(None) };
        Ok(Some(Proof::new(rule, s.clone(), vec![q1, q2])))
    }

    fn counted(&mut self, s: &Sequent, depth: usize, used: &Used) -> Result<Option<Proof>, ProverError> {
        let ctx = &s.ctx;
        // Witnessed weakening.
        for l in s.left.iter() {
            let Formula::Witnessed(pl) = l else { continue };
            for r in s.right.iter() {
                let Formula::Witnessed(pr) = r else { continue };
                let v = s.fresh(&pl.binder);
                let var = ValueTerm::var(&v);
                let p = Sequent::new(
                    ctx.with(v.clone(), ValueType::State),
                    s.left.without(l).with(pl.apply(&var)),
                    s.right.without(r).with(pr.apply(&var)),
                );
                let rule = Rule::WitnessedWeaken { left: l.clone(), right: r.clone(), var: v };
                if let Some(q) = self.unary(rule, s, p, depth, used)? {
                    return Ok(Some(q));
                }
            }
        }
        // Quantifier instantiation.
        let quantified: Vec<(Formula, bool)> = s
            .left
            .iter()
            .filter(|f| matches!(f, Formula::Forall(..)))
            .map(|f| (f.clone(), true))
            .chain(s.right.iter().filter(|f| matches!(f, Formula::Exists(..))).map(|f| (f.clone(), false)))
            .collect();
        for (f, on_left) in quantified {
            let (x, t, body) = match &f {
                Formula::Forall(x, t, b) | Formula::Exists(x, t, b) => (x, t, b),
                _ => unreachable!(),
            };
            let done: Vec<&ValueTerm> = used.iter().filter(|(g, _)| alpha_eq(g, &f)).map(|(_, v)| v).collect();
            if done.len() >= self.cfg.instantiations {
                continue;
            }
            for v in self.candidates(s, t) {
                if done.iter().any(|w| alpha_eq(*w, &v)) {
                    continue;
                }
                let inst = body.subst(x, &v);
                let (p, rule) = if on_left {
                    (seq(ctx, s.left.with(inst), s.right.clone()), Rule::ForallL(f.clone(), v.clone()))
                } else {
                    (seq(ctx, s.left.clone(), s.right.with(inst)), Rule::ExistsR(f.clone(), v.clone()))
                };
                let mut used2 = used.clone();
                used2.push((f.clone(), v));
                if let Some(q) = self.unary(rule, s, p, depth, &used2)? {
                    return Ok(Some(q));
                }
            }
        }
        // Boolean case split on context variables.
        let fv = s.free_vars();
        for (b, t) in ctx.iter() {
            if !t.is_bool() || !fv.contains(b) {
                continue;
            }
            let bv = ValueTerm::var(b);
            let f_eq = Formula::eq(ValueType::bool(), bv.clone(), ValueTerm::ff());
            let t_eq = Formula::eq(ValueType::bool(), bv.clone(), ValueTerm::tt());
            if s.left.contains(&f_eq) || s.left.contains(&t_eq) {
                continue;
            }
            let p1 = seq(ctx, s.left.with(f_eq), s.right.clone());
            let p2 = seq(ctx, s.left.with(t_eq), s.right.clone());
            if let Some(q) = self.binary(Rule::BoolCase(bv), s, p1, p2, depth, used)? {
                return Ok(Some(q));
            }
        }
        Ok(None)
    }

    /// Instantiation terms of type `t`: ground subterms of the sequent, then
    /// context variables, then literals and configured constants.
    fn candidates(&self, s: &Sequent, t: &ValueType) -> Vec<ValueTerm> {
        let mut out: Vec<ValueTerm> = Vec::new();
        let push = |v: ValueTerm, out: &mut Vec<ValueTerm>| {
            if !out.iter().any(|w| alpha_eq(w, &v)) {
                out.push(v);
            }
        };
        for v in ground_subterms(s.left.iter().chain(s.right.iter())) {
            if term_type(&s.ctx, &v).is_some_and(|u| alpha_eq(&u, t)) {
                push(v, &mut out);
            }
        }
        for (x, u) in s.ctx.iter().collect::<Vec<_>>().into_iter().rev() {
            if alpha_eq(u, t) {
                push(ValueTerm::var(x), &mut out);
            }
        }
        match t {
            ValueType::Unit => push(ValueTerm::Unit, &mut out),
            t if t.is_bool() => {
                push(ValueTerm::ff(), &mut out);
                push(ValueTerm::tt(), &mut out);
            }
            ValueType::State => {
                for c in &self.cfg.constants {
                    push(c.clone(), &mut out);
                }
            }
            ValueType::Prod(a, b) => {
                let (xs, ys) = (self.candidates(s, a), self.candidates(s, b));
                for x in xs.iter().take(3) {
                    for y in ys.iter().take(3) {
                        push(ValueTerm::pair(x.clone(), y.clone()), &mut out);
                    }
                }
            }
            _ => {}
        }
        out.truncate(self.cfg.max_candidates);
        out
    }
}
