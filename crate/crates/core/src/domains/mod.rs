//! State domains: the concrete carrier, constants, preorder and primitives
//! that give meaning to the abstract `state` type.

mod counter;
mod escape;
mod heap;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::ast::{Formula, Name, ValueTerm, ValueType};
use crate::eval::{eval_formula, EvalEnv};

pub use counter::DEFAULT_COUNTER_MAX;

type PreorderFn = dyn Fn(&str, &str) -> bool + Send + Sync;
type PrimFn = dyn Fn(&str) -> Name + Send + Sync;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("domain `{0}` declares no constants")]
    NoConstants(String),
    #[error("constant `{0}` is not in the carrier sample")]
    ConstantOutsideCarrier(Name),
    #[error("reflexivity fails at ({0},{0})")]
    NotReflexive(Name),
    #[error("transitivity fails at ({0},{1},{2})")]
    NotTransitive(Name, Name, Name),
    #[error("primitive `{0}` maps `{1}` outside the carrier")]
    PrimitiveEscapes(Name, Name),
    #[error("axiom of primitive `{0}` does not hold over the sample: {1}")]
    AxiomViolated(Name, String),
    #[error("unknown primitive `{0}`")]
    UnknownPrimitive(Name),
    #[error("`{0}` is not a state of domain `{1}`")]
    NotAState(String, String),
    #[error("domain `{0}` is already registered")]
    Duplicate(String),
    #[error("unknown domain `{0}`")]
    UnknownDomain(String),
}

#[derive(Clone)]
pub struct Primitive {
    pub name: Name,
    func: Arc<PrimFn>,
    pub axiom: Option<Formula>,
}

impl Primitive {
    pub fn new(name: impl Into<Name>, func: impl Fn(&str) -> Name + Send + Sync + 'static) -> Self {
        Primitive { name: name.into(), func: Arc::new(func), axiom: None }
    }

    /// Attaches the axiom `forall s:state. rel s (name s)`.
    pub fn inflationary(mut self) -> Self {
        let s = ValueTerm::var("s");
        self.axiom = Some(Formula::forall(
            "s",
            ValueType::State,
            Formula::rel(s.clone(), ValueTerm::prim(self.name.clone(), s)),
        ));
        self
    }

    pub fn apply(&self, state: &str) -> Name {
        (self.func)(state)
    }
}

/// A finite presentation of a state space. Every state value is named by a
/// constant; `carrier` lists the sampled states and `exhaustive` records
/// whether the sample is the whole state space.
#[derive(Clone)]
pub struct StateDomain {
    pub name: String,
    constants: Vec<Name>,
    preorder: Arc<PreorderFn>,
    carrier: Vec<Name>,
    exhaustive: bool,
    primitives: Vec<Primitive>,
}

impl fmt::Debug for StateDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StateDomain")
            .field("name", &self.name)
            .field("constants", &self.constants.len())
            .field("exhaustive", &self.exhaustive)
            .field("primitives", &self.primitives.iter().map(|p| &p.name).collect::<Vec<_>>())
            .finish()
    }
}

impl StateDomain {
    pub fn new(
        name: impl Into<String>,
        constants: Vec<Name>,
        preorder: impl Fn(&str, &str) -> bool + Send + Sync + 'static,
        carrier: Vec<Name>,
        exhaustive: bool,
        primitives: Vec<Primitive>,
    ) -> Self {
        StateDomain {
            name: name.into(),
            constants,
            preorder: Arc::new(preorder),
            carrier,
            exhaustive,
            primitives,
        }
    }

    pub fn counter(max: usize) -> Self {
        counter::counter(max)
    }

    pub fn heap(cells: usize) -> Self {
        heap::heap(cells)
    }

    pub fn escape(max: usize) -> Self {
        escape::escape(max)
    }

    pub fn constants(&self) -> &[Name] {
        &self.constants
    }

    pub fn carrier(&self) -> &[Name] {
        &self.carrier
    }

    pub fn is_exhaustive(&self) -> bool {
        self.exhaustive
    }

    pub fn primitives(&self) -> &[Primitive] {
        &self.primitives
    }

    pub fn primitive(&self, name: &str) -> Option<&Primitive> {
        self.primitives.iter().find(|p| p.name == name)
    }

    pub fn is_constant(&self, c: &str) -> bool {
        self.constants.iter().any(|k| k == c)
    }

    pub fn preorder_names(&self, a: &str, b: &str) -> bool {
        (self.preorder)(a, b)
    }

    pub fn equal_names(&self, a: &str, b: &str) -> bool {
        a == b
    }

    /// Reduces a closed state term (a constant under primitive applications)
    /// to the constant naming its value.
    pub fn state_name(&self, v: &ValueTerm) -> Result<Name, DomainError> {
        match v {
            ValueTerm::Const(c) if self.is_constant(c) => Ok(c.clone()),
            ValueTerm::Prim(p, arg) => {
                let inner = self.state_name(arg)?;
                self.delta_name(p, &inner)
            }
            other => Err(DomainError::NotAState(crate::parser::pretty_value(other), self.name.clone())),
        }
    }

    fn delta_name(&self, prim: &str, state: &str) -> Result<Name, DomainError> {
        let p = self.primitive(prim).ok_or_else(|| DomainError::UnknownPrimitive(prim.to_string()))?;
        Ok(p.apply(state))
    }

    /// Applies primitive `prim` to the state `σ`.
    pub fn delta(&self, prim: &str, sigma: &ValueTerm) -> Result<ValueTerm, DomainError> {
        let s = self.state_name(sigma)?;
        Ok(ValueTerm::Const(self.delta_name(prim, &s)?))
    }

    pub fn preorder(&self, a: &ValueTerm, b: &ValueTerm) -> Result<bool, DomainError> {
        Ok(self.preorder_names(&self.state_name(a)?, &self.state_name(b)?))
    }

    pub fn equal(&self, a: &ValueTerm, b: &ValueTerm) -> Result<bool, DomainError> {
        Ok(self.equal_names(&self.state_name(a)?, &self.state_name(b)?))
    }

    /// Axioms of the primitives occurring in `names`.
    pub fn axioms_for<'a>(&'a self, names: impl IntoIterator<Item = &'a str>) -> Vec<Formula> {
        let wanted: Vec<&str> = names.into_iter().collect();
        self.primitives
            .iter()
            .filter(|p| wanted.contains(&p.name.as_str()))
            .filter_map(|p| p.axiom.clone())
            .collect()
    }

    /// Registration checks: non-empty constants inside the carrier, preorder
    /// laws over the carrier, primitives closed over the carrier, axioms true.
    pub fn validate(&self) -> Result<(), DomainError> {
        if self.constants.is_empty() {
            return Err(DomainError::NoConstants(self.name.clone()));
        }
        for c in &self.constants {
            if !self.carrier.contains(c) {
                return Err(DomainError::ConstantOutsideCarrier(c.clone()));
            }
        }
        for a in &self.carrier {
            if !self.preorder_names(a, a) {
                return Err(DomainError::NotReflexive(a.clone()));
            }
        }
        for a in &self.carrier {
            for b in &self.carrier {
                if !self.preorder_names(a, b) {
                    continue;
                }
                for c in &self.carrier {
                    if self.preorder_names(b, c) && !self.preorder_names(a, c) {
                        return Err(DomainError::NotTransitive(a.clone(), b.clone(), c.clone()));
                    }
                }
            }
        }
        for p in &self.primitives {
            for a in &self.carrier {
                let out = p.apply(a);
                if !self.carrier.contains(&out) {
                    return Err(DomainError::PrimitiveEscapes(p.name.clone(), a.clone()));
                }
            }
            if let Some(ax) = &p.axiom {
                let env = EvalEnv::new(self);
                match eval_formula(&env, ax) {
                    Ok(t) if t.value => {}
                    Ok(_) => return Err(DomainError::AxiomViolated(p.name.clone(), "false on sample".into())),
                    Err(e) => return Err(DomainError::AxiomViolated(p.name.clone(), e.to_string())),
                }
            }
        }
        Ok(())
    }
}

/// Name-addressable set of validated domains.
#[derive(Clone, Debug, Default)]
pub struct DomainRegistry {
    domains: Vec<Arc<StateDomain>>,
}

impl DomainRegistry {
    pub fn new() -> Self {
        DomainRegistry::default()
    }

    /// The compiled-in domains: `counter`, `heap` and `escape`.
    pub fn builtin() -> Self {
        let mut r = DomainRegistry::new();
        for d in [
            StateDomain::counter(DEFAULT_COUNTER_MAX),
            StateDomain::heap(2),
            StateDomain::escape(escape::DEFAULT_ESCAPE_MAX),
        ] {
            r.register(d).expect("built-in domains are lawful");
        }
        r
    }

    pub fn register(&mut self, dom: StateDomain) -> Result<Arc<StateDomain>, DomainError> {
        if self.get(&dom.name).is_some() {
            return Err(DomainError::Duplicate(dom.name));
        }
        dom.validate()?;
        let dom = Arc::new(dom);
        self.domains.push(dom.clone());
        Ok(dom)
    }

    pub fn get(&self, name: &str) -> Option<Arc<StateDomain>> {
        self.domains.iter().find(|d| d.name == name).cloned()
    }

    pub fn lookup(&self, name: &str) -> Result<Arc<StateDomain>, DomainError> {
        self.get(name).ok_or_else(|| DomainError::UnknownDomain(name.to_string()))
    }
}

/// Registers `dom` in a fresh registry; the registration checks as a function.
pub fn register(dom: StateDomain) -> Result<(), DomainError> {
    DomainRegistry::new().register(dom).map(|_| ())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counter_registers() {
        assert!(register(StateDomain::counter(8)).is_ok());
    }

    #[test]
    fn strict_order_is_rejected() {
        let names: Vec<Name> = (0..4).map(|i| format!("c{i}")).collect();
        let num = |s: &str| s[1..].parse::<usize>().unwrap();
        let dom = StateDomain::new("strict", names.clone(), move |a, b| num(a) < num(b), names, true, vec![]);
        assert_eq!(register(dom), Err(DomainError::NotReflexive("c0".into())));
    }

    #[test]
    fn non_transitive_relation_is_rejected() {
        let names: Vec<Name> = (0..3).map(|i| format!("c{i}")).collect();
        let num = |s: &str| s[1..].parse::<i64>().unwrap();
        let dom = StateDomain::new("near", names.clone(), move |a, b| (num(b) - num(a)).abs() <= 1, names, true, vec![]);
        assert!(matches!(register(dom), Err(DomainError::NotTransitive(..))));
    }

    #[test]
    fn heap_sample_is_exhaustive() {
        let h = StateDomain::heap(2);
        assert!(h.is_exhaustive());
        assert_eq!(h.carrier().len(), 9);
        assert!(register(h).is_ok());
    }

    #[test]
    fn false_axiom_is_rejected() {
        let names: Vec<Name> = (0..4).map(|i| format!("c{i}")).collect();
        let num = |s: &str| s[1..].parse::<usize>().unwrap();
        let pred = Primitive::new("pred", move |s| format!("c{}", num(s).saturating_sub(1))).inflationary();
        let dom = StateDomain::new("bad", names.clone(), move |a, b| num(a) <= num(b), names, true, vec![pred]);
        assert!(matches!(register(dom), Err(DomainError::AxiomViolated(..))));
    }

    #[test]
    fn delta_succ_and_clamp() {
        let d = StateDomain::counter(8);
        assert_eq!(d.delta("succ", &ValueTerm::constant("c3")).unwrap(), ValueTerm::constant("c4"));
        assert_eq!(d.delta("succ", &ValueTerm::constant("c8")).unwrap(), ValueTerm::constant("c8"));
        assert_eq!(
            d.delta("nope", &ValueTerm::constant("c3")),
            Err(DomainError::UnknownPrimitive("nope".into()))
        );
    }

    #[test]
    fn registry_lookup() {
        let r = DomainRegistry::builtin();
        assert!(r.get("counter").is_some());
        assert!(r.get("heap").is_some());
        assert!(r.get("escape").is_some());
        assert!(matches!(r.lookup("nope"), Err(DomainError::UnknownDomain(_))));
    }
}
