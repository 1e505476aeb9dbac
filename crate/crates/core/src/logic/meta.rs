//! Derived formulas and meta-level checks: stability, witnessed
//! conjunctions, extensional cut admissibility and witnessed inversion.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::ast::*;

use super::proof::{check_proof, Proof, Rule};
use super::search::{sc_prove_with, ProveOutcome, ProverConfig, ProverError};
use super::sequent::{FormulaSet, Sequent};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum MetaError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Prover(#[from] ProverError),
}

/// `∀s'.∀s''. rel s' s'' ∧ φ[s'/s] ⇒ φ[s''/s]`.
pub fn stable_formula(pred: &Predicate) -> Formula {
    let fv = Formula::Witnessed(pred.clone()).free_vars();
    let s1 = fresh_name("s'", |c| fv.contains(c));
    let s2 = fresh_name("s''", |c| fv.contains(c) || c == s1);
    let (v1, v2) = (ValueTerm::var(&s1), ValueTerm::var(&s2));
    let body = Formula::implies(Formula::and(Formula::rel(v1.clone(), v2.clone()), pred.apply(&v1)), pred.apply(&v2));
    Formula::forall(s1, ValueType::State, Formula::forall(s2, ValueType::State, body))
}

/// `witnessed s'. ⋀ φ_i[s'/s]`, with `⊤` for the empty list.
pub fn witnessed_conj(preds: &[Predicate]) -> Formula {
    let mut fv = BTreeSet::new();
    for p in preds {
        fv.extend(Formula::Witnessed(p.clone()).free_vars());
    }
    let s = fresh_name("s'", |c| fv.contains(c));
    let sv = ValueTerm::var(&s);
    Formula::Witnessed(Predicate::new(s, Formula::conj(preds.iter().map(|p| p.apply(&sv)).collect())))
}

/// Checks one instance of cut admissibility: given provable premises
/// `Γ | Φ ⊢ A, Φ'` and `Γ | Φ, A ⊢ Φ'`, the conclusion `Γ | Φ ⊢ Φ'` must be
/// provable cut-free within twice the depth.
pub fn cut_elim_check(s1: &Sequent, s2: &Sequent, cut: &Formula, depth: usize) -> Result<bool, MetaError> {
    cut_elim_check_with(s1, s2, cut, &ProverConfig::with_depth(depth))
}

pub fn cut_elim_check_with(s1: &Sequent, s2: &Sequent, cut: &Formula, cfg: &ProverConfig) -> Result<bool, MetaError> {
    if !s1.right.contains(cut) {
        return Err(MetaError::Precondition("cut formula is not on the right of the first premise".into()));
    }
    if !s2.left.contains(cut) {
        return Err(MetaError::Precondition("cut formula is not on the left of the second premise".into()));
    }
    if s1.ctx != s2.ctx {
        return Err(MetaError::Precondition("premises have different contexts".into()));
    }
    for (i, s) in [s1, s2].into_iter().enumerate() {
        if !sc_prove_with(s, cfg)?.is_proved() {
            return Err(MetaError::Precondition(format!("premise {} is not provable at depth {}", i + 1, cfg.max_depth)));
        }
    }
    let conclusion = Sequent::new(
        s1.ctx.clone(),
        s1.left.union(&s2.left.without(cut)),
        s1.right.without(cut).union(&s2.right),
    );
    let doubled = ProverConfig { max_depth: 2 * cfg.max_depth, ..cfg.clone() };
    Ok(sc_prove_with(&conclusion, &doubled)?.is_proved())
}

fn names_in(p: &Proof, out: &mut BTreeSet<Name>) {
    out.extend(p.conclusion.taken_names());
    match &p.rule {
        Rule::ForallR(_, y) | Rule::ExistsL(_, y) => {
            out.insert(y.clone());
        }
        Rule::WitnessedWeaken { var, .. } => {
            out.insert(var.clone());
        }
        _ => {}
    }
    for q in &p.premises {
        names_in(q, out);
    }
}

/// From a proof of `Γ | Φ, witnessed(s.φ) ⊢ witnessed(s.φ')` with `Φ`
/// atomic, extracts a proof of `Γ, s:state | Φ, φ ⊢ φ'`. Returns the name
/// chosen for `s` together with the proof.
pub fn witnessed_inversion(p: &Proof) -> Result<(Name, Proof), MetaError> {
    check_proof(p).map_err(|e| MetaError::Precondition(format!("input proof does not check: {e}")))?;
    let c = &p.conclusion;
    let right = c.right.to_vec();
    let [w_right @ Formula::Witnessed(_)] = right.as_slice() else {
        return Err(MetaError::Precondition("right side must be a single witnessed formula".into()));
    };
    let ws: Vec<&Formula> = c.left.iter().filter(|f| matches!(f, Formula::Witnessed(_))).collect();
    let [w_left] = ws.as_slice() else {
        return Err(MetaError::Precondition("left side must contain exactly one witnessed formula".into()));
    };
    if c.left.iter().any(|f| !f.is_atomic() && !matches!(f, Formula::Witnessed(_))) {
        return Err(MetaError::Precondition("Φ must contain only atomic formulas".into()));
    }
    let mut taken = BTreeSet::new();
    names_in(p, &mut taken);
    let Formula::Witnessed(pl) = w_left else { unreachable!() };
    let v = fresh_name(&pl.binder, |x| taken.contains(x));
    let proof = invert(p, w_left, w_right, &v)?;
    Ok((v, proof))
}

fn inverted_sequent(c: &Sequent, wl: &Formula, wr: &Formula, v: &str) -> Sequent {
    let (Formula::Witnessed(pl), Formula::Witnessed(pr)) = (wl, wr) else { unreachable!() };
    let sv = ValueTerm::var(v);
    Sequent::new(
        c.ctx.with(v, ValueType::State),
        c.left.without(wl).with(pl.apply(&sv)),
        FormulaSet::from_vec(vec![pr.apply(&sv)]),
    )
}

fn invert(p: &Proof, wl: &Formula, wr: &Formula, v: &str) -> Result<Proof, MetaError> {
    let c = &p.conclusion;
    let target = inverted_sequent(c, wl, wr, v);
    match &p.rule {
        Rule::WitnessedWeaken { left, right, var } if alpha_eq(left, wl) && alpha_eq(right, wr) => {
            let premise = &p.premises[0];
            if premise.conclusion.left.contains(wl) {
                return Err(MetaError::Precondition("weakening step keeps its principal formula".into()));
            }
            Ok(premise.rename(var, v))
        }
        Rule::Ax(f) if alpha_eq(f, wl) => {
            let Formula::Witnessed(pl) = wl else { unreachable!() };
            Ok(Proof::new(Rule::Ax(pl.apply(&ValueTerm::var(v))), target, vec![]))
        }
        Rule::Ax(f) => Err(MetaError::Precondition(format!("unexpected axiom on `{f}`"))),
        Rule::SumDisjoint(_) => Ok(Proof::new(p.rule.clone(), target, vec![])),
        Rule::EqRefl(..) | Rule::EqTransport { .. } | Rule::RelRefl(_) | Rule::RelTrans(..) | Rule::PairInjective(..) => {
            let sub = invert(&p.premises[0], wl, wr, v)?;
            Ok(Proof::new(p.rule.clone(), target, vec![sub]))
        }
        Rule::BoolCase(_) => {
            let a = invert(&p.premises[0], wl, wr, v)?;
            let b = invert(&p.premises[1], wl, wr, v)?;
            Ok(Proof::new(p.rule.clone(), target, vec![a, b]))
        }
        other => Err(MetaError::Precondition(format!("rule {} cannot occur under the inversion precondition", other.name()))),
    }
}

/// Convenience: proves `goal` and returns the proof or `None`.
pub fn prove_or_none(goal: &Sequent, cfg: &ProverConfig) -> Result<Option<Proof>, ProverError> {
    Ok(match sc_prove_with(goal, cfg)? {
        ProveOutcome::Proved(p) => Some(p),
        ProveOutcome::Unknown(_) => None,
    })
}
