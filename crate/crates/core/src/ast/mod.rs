//! Abstract syntax of the monotonic-state calculus with reification.
//!
//! Binders are named. Substitution renames binders on demand to stay
//! capture-avoiding, and [`alpha_eq`] compares terms up to consistent
//! renaming of bound variables. The abstract (non-reifying) fragment is the
//! subset where every effect index is the literal `false` and no
//! `reify`/`reflect`/`coerce` appears.

mod alpha;
mod fv;
mod subst;

use std::fmt;

pub use alpha::{alpha_eq, AlphaEq};
pub use fv::{fresh_name, FreeVars};
pub use subst::{Subst, Substitute};

pub type Name = String;

/// Source position, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ValueType {
    State,
    Unit,
    Prod(Box<ValueType>, Box<ValueType>),
    Sum(Box<ValueType>, Box<ValueType>),
    /// `(x:t) -> C`; the binder scopes over the codomain only.
    Arrow(Name, Box<ValueType>, Box<CompType>),
}

impl ValueType {
    /// `bool` is `unit + unit`; `false` is the left injection.
    pub fn bool() -> Self {
        ValueType::Sum(Box::new(ValueType::Unit), Box::new(ValueType::Unit))
    }

    pub fn prod(a: ValueType, b: ValueType) -> Self {
        ValueType::Prod(Box::new(a), Box::new(b))
    }

    pub fn sum(a: ValueType, b: ValueType) -> Self {
        ValueType::Sum(Box::new(a), Box::new(b))
    }

    pub fn arrow(x: impl Into<Name>, dom: ValueType, cod: CompType) -> Self {
        ValueType::Arrow(x.into(), Box::new(dom), Box::new(cod))
    }

    pub fn is_bool(&self) -> bool {
        matches!(self, ValueType::Sum(a, b) if **a == ValueType::Unit && **b == ValueType::Unit)
    }
}

/// Computation types: `MST⟨b⟩ t (s. pre) (s x s'. post)` and `Pure t pre (x. post)`.
#[derive(Clone, Debug, PartialEq)]
pub enum CompType {
    Mst {
        index: ValueTerm,
        result: ValueType,
        pre_binder: Name,
        pre: Formula,
        post_binders: (Name, Name, Name),
        post: Formula,
    },
    Pure {
        result: ValueType,
        pre: Formula,
        post_binder: Name,
        post: Formula,
    },
}

impl CompType {
    pub fn result(&self) -> &ValueType {
        match self {
            CompType::Mst { result, .. } | CompType::Pure { result, .. } => result,
        }
    }

    pub fn index(&self) -> Option<&ValueTerm> {
        match self {
            CompType::Mst { index, .. } => Some(index),
            CompType::Pure { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ValueTerm {
    Var(Name),
    Const(Name),
    Unit,
    Pair(Box<ValueTerm>, Box<ValueTerm>),
    /// Left injection; the annotation is the type of the right summand.
    Inl(Box<ValueTerm>, ValueType),
    /// Right injection; the annotation is the type of the left summand.
    Inr(Box<ValueTerm>, ValueType),
    Lambda(Name, ValueType, Box<CompTerm>),
    Reify(Box<CompTerm>),
    /// Domain-declared unary primitive on states.
    Prim(Name, Box<ValueTerm>),
}

impl ValueTerm {
    pub fn var(x: impl Into<Name>) -> Self {
        ValueTerm::Var(x.into())
    }

    pub fn constant(c: impl Into<Name>) -> Self {
        ValueTerm::Const(c.into())
    }

    pub fn pair(a: ValueTerm, b: ValueTerm) -> Self {
        ValueTerm::Pair(Box::new(a), Box::new(b))
    }

    pub fn inl(v: ValueTerm, right: ValueType) -> Self {
        ValueTerm::Inl(Box::new(v), right)
    }

    pub fn inr(v: ValueTerm, left: ValueType) -> Self {
        ValueTerm::Inr(Box::new(v), left)
    }

    pub fn lambda(x: impl Into<Name>, t: ValueType, body: CompTerm) -> Self {
        ValueTerm::Lambda(x.into(), t, Box::new(body))
    }

    pub fn prim(p: impl Into<Name>, v: ValueTerm) -> Self {
        ValueTerm::Prim(p.into(), Box::new(v))
    }

    pub fn ff() -> Self {
        ValueTerm::inl(ValueTerm::Unit, ValueType::Unit)
    }

    pub fn tt() -> Self {
        ValueTerm::inr(ValueTerm::Unit, ValueType::Unit)
    }

    /// `Some(b)` when this is a boolean literal.
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            ValueTerm::Inl(v, t) if **v == ValueTerm::Unit && *t == ValueType::Unit => Some(false),
            ValueTerm::Inr(v, t) if **v == ValueTerm::Unit && *t == ValueType::Unit => Some(true),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CompTerm {
    Return(ValueTerm, ValueTerm),
    PureReturn(ValueTerm),
    Bind(Name, Box<CompTerm>, Box<CompTerm>),
    App(ValueTerm, ValueTerm),
    PMatch(ValueTerm, Name, Name, Box<CompTerm>),
    Case(ValueTerm, Name, Box<CompTerm>, Name, Box<CompTerm>),
    Get(ValueTerm),
    Put(ValueTerm, ValueTerm),
    Witness(ValueTerm, Predicate),
    Recall(ValueTerm, Predicate),
    Reflect(ValueTerm),
    Coerce(Box<CompTerm>),
    /// Source location marker; transparent to every judgment.
    Located(Pos, Box<CompTerm>),
}

impl CompTerm {
    pub fn bind(x: impl Into<Name>, e1: CompTerm, e2: CompTerm) -> Self {
        CompTerm::Bind(x.into(), Box::new(e1), Box::new(e2))
    }

    /// Peels off location markers.
    pub fn unlocated(&self) -> &CompTerm {
        let mut e = self;
        while let CompTerm::Located(_, inner) = e {
            e = inner;
        }
        e
    }

    /// Removes every location marker, including those under lambdas.
    pub fn strip_locations(&self) -> CompTerm {
        use CompTerm::*;
        match self {
            Located(_, e) => e.strip_locations(),
            Return(b, v) => Return(b.strip_locations(), v.strip_locations()),
            PureReturn(v) => PureReturn(v.strip_locations()),
            Bind(x, a, b) => CompTerm::bind(x.clone(), a.strip_locations(), b.strip_locations()),
            App(f, a) => App(f.strip_locations(), a.strip_locations()),
            PMatch(v, a, b, e) => PMatch(v.strip_locations(), a.clone(), b.clone(), Box::new(e.strip_locations())),
            Case(v, a, ea, b, eb) => Case(
                v.strip_locations(),
                a.clone(),
                Box::new(ea.strip_locations()),
                b.clone(),
                Box::new(eb.strip_locations()),
            ),
            Get(b) => Get(b.strip_locations()),
            Put(b, v) => Put(b.strip_locations(), v.strip_locations()),
            Witness(b, p) => Witness(b.strip_locations(), p.clone()),
            Recall(b, p) => Recall(b.strip_locations(), p.clone()),
            Reflect(v) => Reflect(v.strip_locations()),
            Coerce(e) => Coerce(Box::new(e.strip_locations())),
        }
    }
}

impl ValueTerm {
    pub fn strip_locations(&self) -> ValueTerm {
        use ValueTerm::*;
        match self {
            Pair(a, b) => ValueTerm::pair(a.strip_locations(), b.strip_locations()),
            Inl(v, t) => ValueTerm::inl(v.strip_locations(), t.clone()),
            Inr(v, t) => ValueTerm::inr(v.strip_locations(), t.clone()),
            Lambda(x, t, e) => ValueTerm::lambda(x.clone(), t.clone(), e.strip_locations()),
            Reify(e) => Reify(Box::new(e.strip_locations())),
            Prim(p, v) => ValueTerm::prim(p.clone(), v.strip_locations()),
            other => other.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AtomHead {
    Rel,
    Eq(ValueType),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Formula {
    Atom(AtomHead, Vec<ValueTerm>),
    Top,
    Bot,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(Name, ValueType, Box<Formula>),
    Exists(Name, ValueType, Box<Formula>),
    Witnessed(Predicate),
}

impl Formula {
    pub fn rel(a: ValueTerm, b: ValueTerm) -> Self {
        Formula::Atom(AtomHead::Rel, vec![a, b])
    }

    pub fn eq(t: ValueType, a: ValueTerm, b: ValueTerm) -> Self {
        Formula::Atom(AtomHead::Eq(t), vec![a, b])
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn not(a: Formula) -> Self {
        Formula::implies(a, Formula::Bot)
    }

    pub fn forall(x: impl Into<Name>, t: ValueType, body: Formula) -> Self {
        Formula::Forall(x.into(), t, Box::new(body))
    }

    pub fn exists(x: impl Into<Name>, t: ValueType, body: Formula) -> Self {
        Formula::Exists(x.into(), t, Box::new(body))
    }

    pub fn witnessed(p: Predicate) -> Self {
        Formula::Witnessed(p)
    }

    /// Right-nested conjunction; `⊤` when empty.
    pub fn conj(mut fs: Vec<Formula>) -> Self {
        match fs.len() {
            0 => Formula::Top,
            1 => fs.pop().unwrap(),
            _ => {
                let last = fs.pop().unwrap();
                fs.into_iter().rev().fold(last, |acc, f| Formula::and(f, acc))
            }
        }
    }

    /// Right-nested disjunction; `⊥` when empty.
    pub fn disj(mut fs: Vec<Formula>) -> Self {
        match fs.len() {
            0 => Formula::Bot,
            1 => fs.pop().unwrap(),
            _ => {
                let last = fs.pop().unwrap();
                fs.into_iter().rev().fold(last, |acc, f| Formula::or(f, acc))
            }
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Atom(..))
    }
}

/// A state predicate `s. φ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Predicate {
    pub binder: Name,
    pub body: Box<Formula>,
}

impl Predicate {
    pub fn new(binder: impl Into<Name>, body: Formula) -> Self {
        Predicate { binder: binder.into(), body: Box::new(body) }
    }

    /// `φ[v/s]`.
    pub fn apply(&self, v: &ValueTerm) -> Formula {
        self.body.subst(&self.binder, v)
    }
}
