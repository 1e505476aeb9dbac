//! Closed-formula evaluation over a state domain.

use thiserror::Error;

use crate::ast::*;
use crate::domains::{DomainError, StateDomain};
use crate::logic::{sc_prove_with, ProverConfig, Sequent};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(Name),
    #[error("unevaluable: {0}")]
    Unevaluable(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Truth value together with whether it was decided exactly. A universal
/// that holds on a non-exhaustive carrier sample is `value: true, exact: false`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Truth {
    pub value: bool,
    pub exact: bool,
}

impl Truth {
    fn exact(value: bool) -> Self {
        Truth { value, exact: true }
    }
}

/// Evaluation environment: the domain, the witness log and the current state
/// consulted by `witnessed`.
#[derive(Clone, Debug)]
pub struct EvalEnv<'a> {
    pub dom: &'a StateDomain,
    pub log: Vec<Predicate>,
    pub state: Option<ValueTerm>,
    pub prover_depth: usize,
}

impl<'a> EvalEnv<'a> {
    pub fn new(dom: &'a StateDomain) -> Self {
        EvalEnv { dom, log: Vec::new(), state: None, prover_depth: 4 }
    }

    pub fn with_log(mut self, log: &[Predicate]) -> Self {
        self.log = log.to_vec();
        self
    }

    pub fn with_state(mut self, state: ValueTerm) -> Self {
        self.state = Some(state);
        self
    }
}

/// Reduces primitive applications inside a closed value.
pub fn normalize(dom: &StateDomain, v: &ValueTerm) -> Result<ValueTerm, EvalError> {
    Ok(match v {
        ValueTerm::Var(x) => return Err(EvalError::Unbound(x.clone())),
        ValueTerm::Const(_) | ValueTerm::Prim(..) => ValueTerm::Const(dom.state_name(v)?),
        ValueTerm::Unit => ValueTerm::Unit,
        ValueTerm::Pair(a, b) => ValueTerm::pair(normalize(dom, a)?, normalize(dom, b)?),
        ValueTerm::Inl(a, t) => ValueTerm::inl(normalize(dom, a)?, t.clone()),
        ValueTerm::Inr(a, t) => ValueTerm::inr(normalize(dom, a)?, t.clone()),
        ValueTerm::Lambda(..) | ValueTerm::Reify(_) => v.clone(),
    })
}

/// True when `v` contains no primitive application outside a function body.
pub fn is_normal(v: &ValueTerm) -> bool {
    match v {
        ValueTerm::Prim(..) => false,
        ValueTerm::Pair(a, b) => is_normal(a) && is_normal(b),
        ValueTerm::Inl(a, _) | ValueTerm::Inr(a, _) => is_normal(a),
        _ => true,
    }
}

fn first_order(v: &ValueTerm) -> bool {
    match v {
        ValueTerm::Lambda(..) | ValueTerm::Reify(_) => false,
        ValueTerm::Pair(a, b) => first_order(a) && first_order(b),
        ValueTerm::Inl(a, _) | ValueTerm::Inr(a, _) => first_order(a),
        _ => true,
    }
}

/// The closed values of `t`, and whether the list is complete.
pub fn values_of(dom: &StateDomain, t: &ValueType) -> Result<(Vec<ValueTerm>, bool), EvalError> {
    Ok(match t {
        ValueType::State => (dom.carrier().iter().map(|c| ValueTerm::Const(c.clone())).collect(), dom.is_exhaustive()),
        ValueType::Unit => (vec![ValueTerm::Unit], true),
        ValueType::Prod(a, b) => {
            let (xs, ex) = values_of(dom, a)?;
            let (ys, ey) = values_of(dom, b)?;
            let mut out = Vec::with_capacity(xs.len() * ys.len());
            for x in &xs {
                for y in &ys {
                    out.push(ValueTerm::pair(x.clone(), y.clone()));
                }
            }
            (out, ex && ey)
        }
        ValueType::Sum(a, b) => {
            let (xs, ex) = values_of(dom, a)?;
            let (ys, ey) = values_of(dom, b)?;
            let mut out: Vec<ValueTerm> = xs.into_iter().map(|x| ValueTerm::inl(x, (**b).clone())).collect();
            out.extend(ys.into_iter().map(|y| ValueTerm::inr(y, (**a).clone())));
            (out, ex && ey)
        }
        ValueType::Arrow(..) => return Err(EvalError::Unevaluable("quantifier over a function type".into())),
    })
}

fn values_equal(dom: &StateDomain, a: &ValueTerm, b: &ValueTerm) -> Result<bool, EvalError> {
    let (a, b) = (normalize(dom, a)?, normalize(dom, b)?);
    if !first_order(&a) || !first_order(&b) {
        return Err(EvalError::Unevaluable("equality of functions".into()));
    }
    Ok(eq_mod_annotations(&a, &b))
}

/// Structural equality ignoring injection annotations.
fn eq_mod_annotations(a: &ValueTerm, b: &ValueTerm) -> bool {
    match (a, b) {
        (ValueTerm::Pair(a1, a2), ValueTerm::Pair(b1, b2)) => eq_mod_annotations(a1, b1) && eq_mod_annotations(a2, b2),
        (ValueTerm::Inl(x, _), ValueTerm::Inl(y, _)) | (ValueTerm::Inr(x, _), ValueTerm::Inr(y, _)) => {
            eq_mod_annotations(x, y)
        }
        _ => a == b,
    }
}

/// Evaluates a closed formula.
pub fn eval_formula(env: &EvalEnv<'_>, f: &Formula) -> Result<Truth, EvalError> {
    match f {
        Formula::Top => Ok(Truth::exact(true)),
        Formula::Bot => Ok(Truth::exact(false)),
        Formula::Atom(AtomHead::Rel, args) => Ok(Truth::exact(env.dom.preorder(&args[0], &args[1])?)),
        Formula::Atom(AtomHead::Eq(_), args) => Ok(Truth::exact(values_equal(env.dom, &args[0], &args[1])?)),
        Formula::And(a, b) => {
            let ta = eval_formula(env, a)?;
            if ta.exact && !ta.value {
                return Ok(ta);
            }
            let tb = eval_formula(env, b)?;
            Ok(combine(ta, tb, |x, y| x && y))
        }
        Formula::Or(a, b) => {
            let ta = eval_formula(env, a)?;
            if ta.exact && ta.value {
                return Ok(ta);
            }
            let tb = eval_formula(env, b)?;
            Ok(combine(ta, tb, |x, y| x || y))
        }
        Formula::Implies(a, b) => {
            let ta = eval_formula(env, a)?;
            if ta.exact && !ta.value {
                return Ok(Truth::exact(true));
            }
            let tb = eval_formula(env, b)?;
            Ok(combine(ta, tb, |x, y| !x || y))
        }
        Formula::Forall(x, t, body) => quantify(env, x, t, body, true),
        Formula::Exists(x, t, body) => {
            if let Some(w) = defining_equation(x, body) {
                let inst = body.subst(x, &w);
                let tr = eval_formula(env, &inst)?;
                if tr.value {
                    return Ok(tr);
                }
            }
            quantify(env, x, t, body, false)
        }
        Formula::Witnessed(p) => eval_witnessed(env, p),
    }
}

fn combine(a: Truth, b: Truth, op: impl Fn(bool, bool) -> bool) -> Truth {
    let value = op(a.value, b.value);
    // A result that is forced by an exact operand is exact.
    let forced_by = |t: Truth| t.exact && op(t.value, !value) == value && op(!value, t.value) == value;
    let exact = (a.exact && b.exact) || (a.exact && forced_by(a)) || (b.exact && forced_by(b));
    Truth { value, exact }
}

fn quantify(env: &EvalEnv<'_>, x: &str, t: &ValueType, body: &Formula, universal: bool) -> Result<Truth, EvalError> {
    let (vals, complete) = values_of(env.dom, t)?;
    let mut all_exact = complete;
    for v in &vals {
        let tr = eval_formula(env, &body.subst(x, v))?;
        if tr.value != universal {
            return Ok(Truth { value: !universal, exact: tr.exact });
        }
        all_exact &= tr.exact;
    }
    Ok(Truth { value: universal, exact: all_exact })
}

/// For `∃x. … ∧ x == w ∧ …` with `w` free of `x`, returns `w`.
fn defining_equation(x: &str, body: &Formula) -> Option<ValueTerm> {
    match body {
        Formula::And(a, b) => defining_equation(x, a).or_else(|| defining_equation(x, b)),
        Formula::Atom(AtomHead::Eq(_), args) => {
            let is_x = |v: &ValueTerm| matches!(v, ValueTerm::Var(y) if y == x);
            if is_x(&args[0]) && !args[1].has_free(x) {
                Some(args[1].clone())
            } else if is_x(&args[1]) && !args[0].has_free(x) {
                Some(args[0].clone())
            } else {
                None
            }
        }
        _ => None,
    }
}

fn eval_witnessed(env: &EvalEnv<'_>, p: &Predicate) -> Result<Truth, EvalError> {
    let left: Vec<Formula> = env.log.iter().cloned().map(Formula::Witnessed).collect();
    let goal = Sequent::from_formulas(Default::default(), left, vec![Formula::Witnessed(p.clone())]);
    let mut cfg = ProverConfig::with_depth(env.prover_depth);
    cfg.node_budget = 20_000;
    if let Ok(out) = sc_prove_with(&goal, &cfg) {
        if out.is_proved() {
            return Ok(Truth::exact(true));
        }
    }
    match &env.state {
        Some(s) => {
            let t = eval_formula(env, &p.apply(s))?;
            Ok(Truth { value: t.value, exact: false })
        }
        None => Ok(Truth { value: false, exact: false }),
    }
}
