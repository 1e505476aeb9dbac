//! Small-step reduction of configurations `(e, σ, W)`.

use std::fmt;

use crate::ast::*;
use crate::domains::StateDomain;

use super::formula::{is_normal, normalize};

/// Witnessed predicates, deduplicated up to alpha-equivalence, in insertion order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WitnessLog {
    preds: Vec<Predicate>,
}

impl WitnessLog {
    pub fn new() -> Self {
        WitnessLog::default()
    }

    /// Returns whether the log grew.
    pub fn insert(&mut self, p: Predicate) -> bool {
        let f = Formula::Witnessed(p.clone());
        if self.preds.iter().any(|q| alpha_eq(&Formula::Witnessed(q.clone()), &f)) {
            return false;
        }
        self.preds.push(p);
        true
    }

    pub fn contains(&self, p: &Predicate) -> bool {
        let f = Formula::Witnessed(p.clone());
        self.preds.iter().any(|q| alpha_eq(&Formula::Witnessed(q.clone()), &f))
    }

    pub fn is_subset(&self, other: &WitnessLog) -> bool {
        self.preds.iter().all(|p| other.contains(p))
    }

    pub fn len(&self) -> usize {
        self.preds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.preds.is_empty()
    }

    pub fn preds(&self) -> &[Predicate] {
        &self.preds
    }
}

impl FromIterator<Predicate> for WitnessLog {
    fn from_iter<I: IntoIterator<Item = Predicate>>(iter: I) -> Self {
        let mut log = WitnessLog::new();
        for p in iter {
            log.insert(p);
        }
        log
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    pub term: CompTerm,
    pub state: ValueTerm,
    pub log: WitnessLog,
}

impl Configuration {
    pub fn new(term: CompTerm, state: ValueTerm) -> Self {
        Configuration { term, state, log: WitnessLog::new() }
    }

    pub fn with_log(mut self, log: WitnessLog) -> Self {
        self.log = log;
        self
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {{", self.term, self.state)?;
        for (i, p) in self.log.preds().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}})")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StepResult {
    /// One reduction; the name is that of the innermost rule fired, or the
    /// context rule for `reify`/`reflect` contexts.
    Stepped(Configuration, &'static str),
    Done(ValueTerm),
    Stuck(String),
}

fn stuck(msg: impl Into<String>, e: &CompTerm) -> StepResult {
    StepResult::Stuck(format!("{}: `{}`", msg.into(), e))
}

/// The returned value, when `e` is a return of a normal value.
pub fn returned_value(e: &CompTerm) -> Option<&ValueTerm> {
    match e.unlocated() {
        CompTerm::Return(_, v) | CompTerm::PureReturn(v) if is_normal(v) => Some(v),
        _ => None,
    }
}

fn cfg(term: CompTerm, state: ValueTerm, log: WitnessLog) -> Configuration {
    Configuration { term, state, log }
}

/// One reduction step.
pub fn step(c: &Configuration, dom: &StateDomain) -> StepResult {
    let Configuration { term, state, log } = c;
    let e = term.unlocated();
    let same = |t: CompTerm, rule| StepResult::Stepped(cfg(t, state.clone(), log.clone()), rule);
    match e {
        CompTerm::Located(..) => unreachable!(),
        CompTerm::Return(b, v) => {
            if is_normal(v) {
                return StepResult::Done(v.clone());
            }
            match normalize(dom, v) {
                Ok(n) => same(CompTerm::Return(b.clone(), n), "Delta"),
                Err(err) => stuck(err.to_string(), e),
            }
        }
        CompTerm::PureReturn(v) => {
            if is_normal(v) {
                return StepResult::Done(v.clone());
            }
            match normalize(dom, v) {
                Ok(n) => same(CompTerm::PureReturn(n), "Delta"),
                Err(err) => stuck(err.to_string(), e),
            }
        }
        CompTerm::Get(b) => same(CompTerm::Return(b.clone(), state.clone()), "Get"),
        CompTerm::Put(b, s) => match normalize(dom, s) {
            Ok(n @ ValueTerm::Const(_)) => StepResult::Stepped(cfg(CompTerm::Return(b.clone(), ValueTerm::Unit), n, log.clone()), "Put"),
            Ok(_) => stuck("put of a non-state", e),
            Err(err) => stuck(err.to_string(), e),
        },
        CompTerm::Witness(b, p) => match b.as_bool() {
            Some(false) => {
                let mut log = log.clone();
                log.insert(p.clone());
                StepResult::Stepped(cfg(CompTerm::Return(b.clone(), ValueTerm::Unit), state.clone(), log), "Witness-False")
            }
            Some(true) => same(CompTerm::Return(b.clone(), ValueTerm::Unit), "Witness-True"),
            None => stuck("witness with a non-literal index", e),
        },
        CompTerm::Recall(b, _) => same(CompTerm::Return(b.clone(), ValueTerm::Unit), "Recall"),
        CompTerm::Bind(x, e1, e2) => {
            if let Some(v) = returned_value(e1) {
                return same(e2.subst(x, v), "Bind-Return");
            }
            match step(&cfg((**e1).clone(), state.clone(), log.clone()), dom) {
                StepResult::Stepped(c1, rule) => {
                    StepResult::Stepped(cfg(CompTerm::Bind(x.clone(), Box::new(c1.term), e2.clone()), c1.state, c1.log), rule)
                }
                StepResult::Done(_) => unreachable!("returned_value covers Done"),
                s @ StepResult::Stuck(_) => s,
            }
        }
        CompTerm::App(f, a) => match f {
            ValueTerm::Lambda(x, _, body) => same(body.subst(x, a), "Beta"),
            ValueTerm::Reify(body) => {
                let sigma = match normalize(dom, a) {
                    Ok(n @ ValueTerm::Const(_)) => n,
                    _ => return stuck("reified computation applied to a non-state", e),
                };
                if let Some(v) = returned_value(body) {
                    return same(CompTerm::PureReturn(ValueTerm::pair(v.clone(), sigma)), "Reify-Return");
                }
                match step(&cfg((**body).clone(), sigma, log.clone()), dom) {
                    StepResult::Stepped(c1, _) => StepResult::Stepped(
                        cfg(CompTerm::App(ValueTerm::Reify(Box::new(c1.term)), c1.state), state.clone(), c1.log),
                        "Reify-Context",
                    ),
                    StepResult::Done(_) => unreachable!("returned_value covers Done"),
                    s @ StepResult::Stuck(_) => s,
                }
            }
            _ => stuck("application of a non-function", e),
        },
        CompTerm::PMatch(v, x1, x2, body) => match normalize(dom, v) {
            Ok(ValueTerm::Pair(a, b)) => same(body.subst_many(&Subst::single(x1.clone(), *a).with(x2.clone(), *b)), "PMatch"),
            _ => stuck("pattern match on a non-pair", e),
        },
        CompTerm::Case(v, xl, el, xr, er) => match normalize(dom, v) {
            Ok(ValueTerm::Inl(a, _)) => same(el.subst(xl, &a), "Case-Inl"),
            Ok(ValueTerm::Inr(a, _)) => same(er.subst(xr, &a), "Case-Inr"),
            _ => stuck("case on a non-injection", e),
        },
        CompTerm::Reflect(v) => match v {
            ValueTerm::Reify(inner) => same((**inner).clone(), "Reflect-Reify"),
            ValueTerm::Lambda(s, _, body) => {
                if let CompTerm::PureReturn(ValueTerm::Pair(r, s1)) = body.unlocated() {
                    let r = r.subst(s, state);
                    let s1 = s1.subst(s, state);
                    return match normalize(dom, &s1) {
                        Ok(n @ ValueTerm::Const(_)) => {
                            StepResult::Stepped(cfg(CompTerm::Return(ValueTerm::tt(), r), n, log.clone()), "Reflect-Return")
                        }
                        _ => stuck("reflected function returned a non-state", e),
                    };
                }
                let inst = body.subst(s, state);
                match step(&cfg(inst, state.clone(), log.clone()), dom) {
                    StepResult::Stepped(c1, _) => StepResult::Stepped(
                        cfg(CompTerm::Reflect(ValueTerm::lambda("_", ValueType::State, c1.term)), c1.state, c1.log),
                        "Reflect-Context",
                    ),
                    StepResult::Done(v) => stuck(format!("reflected function returned `{v}`, not a pair"), e),
                    s @ StepResult::Stuck(_) => s,
                }
            }
            _ => stuck("reflect of a non-function", e),
        },
        CompTerm::Coerce(inner) => {
            if let Some(v) = returned_value(inner) {
                return same(CompTerm::Return(ValueTerm::ff(), v.clone()), "Coerce-Return");
            }
            match step(&cfg((**inner).clone(), state.clone(), log.clone()), dom) {
                StepResult::Stepped(c1, rule) => StepResult::Stepped(cfg(CompTerm::Coerce(Box::new(c1.term)), c1.state, c1.log), rule),
                StepResult::Done(_) => unreachable!("returned_value covers Done"),
                s @ StepResult::Stuck(_) => s,
            }
        }
    }
}

/// How a run ended.
#[derive(Clone, Debug, PartialEq)]
pub enum Terminal {
    Done(ValueTerm),
    Stuck(String),
    OutOfFuel,
}

/// `configs[0]` is the initial configuration; `rules[i]` takes `configs[i]`
/// to `configs[i + 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub configs: Vec<Configuration>,
    pub rules: Vec<&'static str>,
    pub end: Terminal,
}

impl Trace {
    pub fn last(&self) -> &Configuration {
        self.configs.last().expect("a trace has an initial configuration")
    }

    pub fn steps(&self) -> usize {
        self.rules.len()
    }

    pub fn value(&self) -> Option<&ValueTerm> {
        match &self.end {
            Terminal::Done(v) => Some(v),
            _ => None,
        }
    }
}

pub const DEFAULT_FUEL: usize = 100_000;

/// Iterates [`step`] from `(program, σ0, ∅)` for at most `fuel` steps.
pub fn run(program: &CompTerm, sigma0: &ValueTerm, dom: &StateDomain, fuel: usize) -> Trace {
    run_from(Configuration::new(program.clone(), sigma0.clone()), dom, fuel)
}

pub fn run_from(init: Configuration, dom: &StateDomain, fuel: usize) -> Trace {
    let mut configs = vec![init];
    let mut rules = Vec::new();
    loop {
        if rules.len() >= fuel {
            return Trace { configs, rules, end: Terminal::OutOfFuel };
        }
        match step(configs.last().unwrap(), dom) {
            StepResult::Stepped(c, rule) => {
                configs.push(c);
                rules.push(rule);
            }
            StepResult::Done(v) => return Trace { configs, rules, end: Terminal::Done(v) },
            StepResult::Stuck(msg) => return Trace { configs, rules, end: Terminal::Stuck(msg) },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_comp;

    fn c3() -> ValueTerm {
        ValueTerm::constant("c3")
    }

    fn one(src: &str) -> (Configuration, &'static str) {
        let d = StateDomain::counter(8);
        match step(&Configuration::new(parse_comp(src).unwrap(), c3()), &d) {
            StepResult::Stepped(c, r) => (c, r),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn get_returns_state() {
        let (c, r) = one("get⟨false⟩");
        assert_eq!(r, "Get");
        assert_eq!(c.term, CompTerm::Return(ValueTerm::ff(), c3()));
        assert_eq!(c.state, c3());
    }

    #[test]
    fn witness_false_logs() {
        let (c, r) = one("witness⟨false⟩ (s. rel c0 s)");
        assert_eq!(r, "Witness-False");
        assert_eq!(c.log.len(), 1);
        assert_eq!(c.term, CompTerm::Return(ValueTerm::ff(), ValueTerm::Unit));
    }

    #[test]
    fn witness_true_is_a_no_op() {
        let (c, r) = one("witness⟨true⟩ (s. rel c0 s)");
        assert_eq!(r, "Witness-True");
        assert!(c.log.is_empty());
    }

    #[test]
    fn reflect_reify_cancels() {
        let (c, r) = one("reflect (reify get⟨true⟩)");
        assert_eq!(r, "Reflect-Reify");
        assert!(alpha_eq(&c.term, &parse_comp("get⟨true⟩").unwrap()));
    }

    #[test]
    fn put_then_get() {
        let d = StateDomain::counter(8);
        let e = parse_comp("bind x = put⟨false⟩ (succ c3) in get⟨false⟩").unwrap();
        let t = run(&e, &c3(), &d, 100);
        assert_eq!(t.end, Terminal::Done(ValueTerm::constant("c4")));
        assert_eq!(t.last().state, ValueTerm::constant("c4"));
    }

    #[test]
    fn application_of_a_state_is_stuck() {
        let d = StateDomain::counter(8);
        let e = CompTerm::App(c3(), ValueTerm::Unit);
        assert!(matches!(step(&Configuration::new(e, c3()), &d), StepResult::Stuck(_)));
    }
}
