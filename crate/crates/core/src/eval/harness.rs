//! Runtime checks of the metatheory along traces: log monotonicity,
//! preorder compliance, well-formed state/log pairs and partial correctness.

use std::fmt;

use thiserror::Error;

use crate::ast::*;
use crate::domains::{DomainRegistry, StateDomain};
use crate::logic::{sc_prove_with, stable_formula, terms::primitives_in, ProverConfig, Sequent};
use crate::parser::{parse_value, pretty_value};

use super::formula::{eval_formula, EvalEnv, Truth};
use super::step::{Terminal, Trace, WitnessLog};

/// How stability of a logged predicate was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stability {
    /// `stable(s.φ)` was proved by the sequent prover.
    Proved,
    /// Checked over the whole (exhaustive) carrier.
    Exhaustive,
    /// Checked over a non-exhaustive carrier sample.
    Sampled,
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stability::Proved => "proved",
            Stability::Exhaustive => "exhaustive",
            Stability::Sampled => "sampled-true",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{pred}: {message}")]
pub struct WfError {
    pub pred: String,
    pub message: String,
}

/// Semantic stability over the carrier sample; `Err` carries a counterexample.
fn stable_on_carrier(dom: &StateDomain, p: &Predicate, log: &[Predicate]) -> Result<Stability, String> {
    let holds = |c: &Name| -> Result<bool, String> {
        let s = ValueTerm::Const(c.clone());
        let env = EvalEnv::new(dom).with_log(log).with_state(s.clone());
        eval_formula(&env, &p.apply(&s)).map(|t| t.value).map_err(|e| e.to_string())
    };
    let mut truth = Vec::with_capacity(dom.carrier().len());
    for c in dom.carrier() {
        truth.push(holds(c)?);
    }
    for (i, a) in dom.carrier().iter().enumerate() {
        if !truth[i] {
            continue;
        }
        for (j, b) in dom.carrier().iter().enumerate() {
            if !truth[j] && dom.preorder_names(a, b) {
                return Err(format!("not stable: holds at {a}, fails at {b} although rel {a} {b}"));
            }
        }
    }
    Ok(if dom.is_exhaustive() { Stability::Exhaustive } else { Stability::Sampled })
}

/// Stability of `p`: symbolic first, then semantic over the carrier.
pub fn stability(dom: &StateDomain, p: &Predicate, depth: usize) -> Result<Stability, String> {
    let f = stable_formula(p);
    let mut left: Vec<Formula> = dom.axioms_for(primitives_in([&f]).iter().map(|s| s.as_str()));
    left.dedup();
    let goal = Sequent::from_formulas(Default::default(), left, vec![f]);
    let mut cfg = ProverConfig::with_depth(depth);
    cfg.node_budget = 50_000;
    cfg.constants = dom.constants().first().map(|c| ValueTerm::Const(c.clone())).into_iter().collect();
    if matches!(sc_prove_with(&goal, &cfg), Ok(o) if o.is_proved()) {
        return Ok(Stability::Proved);
    }
    stable_on_carrier(dom, p, &[])
}

/// `⊢ (σ, W) wf`: every logged predicate holds at `σ` and is stable.
pub fn wf_state_log(sigma: &ValueTerm, log: &WitnessLog, dom: &StateDomain, depth: usize) -> Result<Vec<Stability>, WfError> {
    let mut out = Vec::new();
    for p in log.preds() {
        check_truth(sigma, log, dom, p)?;
        out.push(stability(dom, p, depth).map_err(|m| WfError { pred: p.to_string(), message: m })?);
    }
    Ok(out)
}

fn check_truth(sigma: &ValueTerm, log: &WitnessLog, dom: &StateDomain, p: &Predicate) -> Result<(), WfError> {
    let env = EvalEnv::new(dom).with_log(log.preds()).with_state(sigma.clone());
    match eval_formula(&env, &p.apply(sigma)) {
        Ok(t) if t.value => Ok(()),
        Ok(_) => Err(WfError { pred: p.to_string(), message: format!("false at the current state {sigma}") }),
        Err(e) => Err(WfError { pred: p.to_string(), message: e.to_string() }),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub step: usize,
    pub clause: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {}: {}: {}", self.step, self.clause, self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct HarnessReport {
    pub steps: usize,
    pub violations: Vec<Violation>,
    /// Stability evidence for each predicate ever logged, in log order.
    pub stability: Vec<(String, Stability)>,
    /// Truth of the ascribed postcondition at the end, when checked.
    pub post: Option<Truth>,
    /// Set when the ascribed precondition was false at the initial state.
    pub pre_failed: bool,
}

impl HarnessReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn violate(&mut self, step: usize, clause: &'static str, message: impl Into<String>) {
        self.violations.push(Violation { step, clause, message: message.into() });
    }
}

impl fmt::Display for HarnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "steps: {}", self.steps)?;
        for (p, s) in &self.stability {
            writeln!(f, "stable {p}: {s}")?;
        }
        match (self.pre_failed, self.post) {
            (true, _) => writeln!(f, "post: not checked (precondition false initially)")?,
            (false, Some(t)) => writeln!(f, "post: {}{}", t.value, if t.exact { "" } else { " (sampled)" })?,
            _ => {}
        }
        for v in &self.violations {
            writeln!(f, "violation {v}")?;
        }
        write!(f, "harness: {}", if self.ok() { "ok" } else { "FAILED" })
    }
}

fn check_transition(
    r: &mut HarnessReport,
    i: usize,
    rule: &str,
    dom: &StateDomain,
    (s0, w0): (&ValueTerm, usize),
    (s1, w1): (&ValueTerm, usize),
    subset: bool,
) {
    if !subset || w1 < w0 {
        r.violate(i, "log-monotone", format!("log shrank from {w0} to {w1}"));
    } else if rule != "Witness-False" && w1 != w0 {
        r.violate(i, "log-frozen", format!("{rule} changed the log ({w0} -> {w1})"));
    }
    match dom.preorder(s0, s1) {
        Ok(true) => {}
        Ok(false) => r.violate(i, "preorder", format!("rel {s0} {s1} fails")),
        Err(e) => r.violate(i, "preorder", e.to_string()),
    }
}

/// Checks every theorem clause along `trace`. When `ty` is given and its
/// precondition holds initially, the postcondition is checked at the end.
pub fn harness_check(trace: &Trace, dom: &StateDomain, depth: usize, ty: Option<&CompType>) -> HarnessReport {
    let mut r = HarnessReport { steps: trace.steps(), ..Default::default() };
    for (i, rule) in trace.rules.iter().enumerate() {
        let (a, b) = (&trace.configs[i], &trace.configs[i + 1]);
        let subset = a.log.is_subset(&b.log);
        check_transition(&mut r, i + 1, rule, dom, (&a.state, a.log.len()), (&b.state, b.log.len()), subset);
    }
    // Stability once per predicate; truth at every configuration.
    let last = trace.last();
    for p in last.log.preds() {
        match stability(dom, p, depth) {
            Ok(s) => r.stability.push((p.to_string(), s)),
            Err(m) => r.violate(0, "wf-state-log", format!("{p}: {m}")),
        }
    }
    for (i, c) in trace.configs.iter().enumerate() {
        for p in c.log.preds() {
            if let Err(e) = check_truth(&c.state, &c.log, dom, p) {
                r.violate(i, "wf-state-log", e.to_string());
            }
        }
    }
    if let Terminal::Stuck(msg) = &trace.end {
        r.violate(trace.steps(), "progress", msg.clone());
    }
    if let (Some(ty), Terminal::Done(v)) = (ty, &trace.end) {
        check_post(&mut r, trace, dom, depth, ty, v);
    }
    r
}

fn check_post(r: &mut HarnessReport, trace: &Trace, dom: &StateDomain, depth: usize, ty: &CompType, v: &ValueTerm) {
    let s0 = &trace.configs[0].state;
    let last = trace.last();
    let (pre, post) = match ty {
        CompType::Mst { pre_binder, pre, post_binders: (s, x, s1), post, .. } => (
            pre.subst(pre_binder, s0),
            post.subst_many(&Subst::single(s.clone(), s0.clone()).with(x.clone(), v.clone()).with(s1.clone(), last.state.clone())),
        ),
        CompType::Pure { pre, post_binder, post, .. } => (pre.clone(), post.subst(post_binder, v)),
    };
    let mut env0 = EvalEnv::new(dom).with_log(trace.configs[0].log.preds()).with_state(s0.clone());
    env0.prover_depth = depth.min(4);
    match eval_formula(&env0, &pre) {
        Ok(t) if !t.value => {
            r.pre_failed = true;
            return;
        }
        Ok(_) => {}
        Err(e) => return r.violate(0, "pre", e.to_string()),
    }
    let mut env = EvalEnv::new(dom).with_log(last.log.preds()).with_state(last.state.clone());
    env.prover_depth = depth.min(4);
    match eval_formula(&env, &post) {
        Ok(t) => {
            r.post = Some(t);
            if !t.value {
                r.violate(trace.steps(), "post", format!("postcondition false: {post}"));
            }
        }
        Err(e) => r.violate(trace.steps(), "post", e.to_string()),
    }
}

/// One row per configuration: `index TAB rule TAB state TAB logSize`,
/// preceded by a `# domain NAME` header. Row 0 is the initial configuration.
pub fn export_trace(trace: &Trace, dom: &StateDomain) -> String {
    let mut out = format!("# domain {}\n", dom.name);
    for (i, c) in trace.configs.iter().enumerate() {
        let rule = if i == 0 { "Init" } else { trace.rules[i - 1] };
        out.push_str(&format!("{i}\t{rule}\t{}\t{}\n", pretty_value(&c.state), c.log.len()));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("line {0}: {1}")]
    Malformed(usize, String),
    #[error("missing `# domain` header")]
    NoDomain,
    #[error("{0}")]
    Domain(String),
}

/// Re-checks an exported trace: preorder between consecutive states and log
/// monotonicity (growth only on `Witness-False`).
pub fn replay_trace(text: &str, registry: &DomainRegistry) -> Result<HarnessReport, ReplayError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(ReplayError::NoDomain)?;
    let name = header.strip_prefix("# domain ").ok_or(ReplayError::NoDomain)?.trim();
    let dom = registry.lookup(name).map_err(|e| ReplayError::Domain(e.to_string()))?;
    let mut rows: Vec<(String, ValueTerm, usize)> = Vec::new();
    for (n, line) in lines {
        let bad = |m: &str| ReplayError::Malformed(n + 1, m.to_string());
        let cols: Vec<&str> = line.split('\t').collect();
        let [idx, rule, state, size] = cols.as_slice() else { return Err(bad("expected 4 tab-separated columns")) };
        if idx.parse::<usize>().ok() != Some(rows.len()) {
            return Err(bad("step indices must count up from 0"));
        }
        let state = parse_value(state).map_err(|e| bad(&e.to_string()))?;
        dom.state_name(&state).map_err(|e| bad(&e.to_string()))?;
        let size = size.parse().map_err(|_| bad("log size is not a number"))?;
        rows.push((rule.to_string(), state, size));
    }
    if rows.is_empty() {
        return Err(ReplayError::Malformed(1, "no rows".into()));
    }
    let mut r = HarnessReport { steps: rows.len() - 1, ..Default::default() };
    for i in 1..rows.len() {
        let (_, s0, w0) = &rows[i - 1];
        let (rule, s1, w1) = &rows[i];
        check_transition(&mut r, i, rule, &dom, (s0, *w0), (s1, *w1), true);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{run, Configuration};
    use crate::parser::{parse_comp, parse_formula};

    fn pred(src: &str) -> Predicate {
        let Formula::Witnessed(p) = parse_formula(&format!("witnessed ({src})")).unwrap() else { unreachable!() };
        p
    }

    fn c(n: usize) -> ValueTerm {
        ValueTerm::constant(format!("c{n}"))
    }

    #[test]
    fn wf_examples() {
        let d = StateDomain::counter(8);
        let log: WitnessLog = [pred("s. rel c0 s")].into_iter().collect();
        assert_eq!(wf_state_log(&c(3), &log, &d, 6), Ok(vec![Stability::Proved]));
        let log: WitnessLog = [pred("s. s == c5")].into_iter().collect();
        assert!(wf_state_log(&c(3), &log, &d, 6).unwrap_err().message.contains("false at the current state"));
        let log: WitnessLog = [pred("s. rel s c3")].into_iter().collect();
        assert!(wf_state_log(&c(3), &log, &d, 6).unwrap_err().message.contains("not stable"));
    }

    #[test]
    fn backwards_put_violates_preorder() {
        let d = StateDomain::counter(8);
        let e = parse_comp("put⟨false⟩ c1").unwrap();
        let t = run(&e, &c(3), &d, 10);
        let r = harness_check(&t, &d, 4, None);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].clause, "preorder");
        assert_eq!(r.violations[0].step, 1);
    }

    #[test]
    fn export_and_replay() {
        let d = StateDomain::counter(8);
        let e = parse_comp("bind u = witness⟨false⟩ (s. rel c0 s) in put⟨false⟩ (succ c3)").unwrap();
        let t = crate::eval::run_from(Configuration::new(e, c(3)), &d, 100);
        let text = export_trace(&t, &d);
        assert!(text.starts_with("# domain counter\n0\tInit\tc3\t0\n"));
        let r = replay_trace(&text, &DomainRegistry::builtin()).unwrap();
        assert!(r.ok(), "{r}");
        let tampered = text.replace("\tc4\t", "\tc2\t");
        assert!(!replay_trace(&tampered, &DomainRegistry::builtin()).unwrap().ok());
    }
}
