//! Seeded generators and corpus helpers shared by the integration tests.
#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use monostate::ast::*;
use monostate::logic::Sequent;
use monostate::typecheck::TypingContext;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// `(file name, contents)` for every corpus file with the given extension, sorted.
pub fn corpus(ext: &str) -> Vec<(String, String)> {
    let mut out: Vec<_> = fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == ext))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap()))
        .collect();
    out.sort();
    out
}

const BINDERS: &[&str] = &["x", "y", "z", "n", "s", "t"];
const CONSTS: &[&str] = &["c0", "c1", "c2", "c3", "c4"];
const PRIMS: &[&str] = &["succ", "bump"];

pub struct Gen {
    pub rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn pick<T: Clone>(&mut self, xs: &[T]) -> T {
        xs.choose(&mut self.rng).unwrap().clone()
    }

    fn coin(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn binder(&mut self) -> Name {
        self.pick(BINDERS).to_string()
    }

    pub fn constant(&mut self) -> ValueTerm {
        ValueTerm::constant(self.pick(CONSTS))
    }

    // ---- untyped syntax, for printing round trips -------------------------

    pub fn value_type(&mut self, d: u32) -> ValueType {
        let k = if d == 0 { self.rng.gen_range(0..3) } else { self.rng.gen_range(0..6) };
        match k {
            0 => ValueType::State,
            1 => ValueType::Unit,
            2 => ValueType::bool(),
            3 => ValueType::prod(self.value_type(d - 1), self.value_type(d - 1)),
            4 => ValueType::sum(self.value_type(d - 1), self.value_type(d - 1)),
            _ => {
                let x = self.binder();
                let dom = self.value_type(d - 1);
                let cod = self.comp_type(std::slice::from_ref(&x), d - 1);
                ValueType::arrow(x, dom, cod)
            }
        }
    }

    fn index(&mut self, scope: &[Name]) -> ValueTerm {
        match self.rng.gen_range(0..5) {
            0 if !scope.is_empty() => ValueTerm::var(self.pick(scope)),
            0..=2 => ValueTerm::ff(),
            _ => ValueTerm::tt(),
        }
    }

    /// Values that may appear as arguments of `rel` and `==`.
    fn atom_term(&mut self, scope: &[Name], d: u32) -> ValueTerm {
        match self.rng.gen_range(0..if d == 0 { 3 } else { 5 }) {
            0 if !scope.is_empty() => ValueTerm::var(self.pick(scope)),
            0 | 1 => self.constant(),
            2 => ValueTerm::Unit,
            3 => ValueTerm::prim(self.pick(PRIMS), self.atom_term(scope, d - 1)),
            _ => ValueTerm::pair(self.atom_term(scope, d - 1), self.atom_term(scope, d - 1)),
        }
    }

    pub fn value(&mut self, scope: &[Name], d: u32) -> ValueTerm {
        if d == 0 {
            return self.atom_term(scope, 0);
        }
        match self.rng.gen_range(0..8) {
            0 | 1 => self.atom_term(scope, d),
            2 => ValueTerm::pair(self.value(scope, d - 1), self.value(scope, d - 1)),
            3 => ValueTerm::inl(self.value(scope, d - 1), self.value_type(1)),
            4 => ValueTerm::inr(self.value(scope, d - 1), self.value_type(1)),
            5 => {
                let x = self.binder();
                let t = self.value_type(1);
                let body = self.comp(&with(scope, &x), d - 1);
                ValueTerm::lambda(x, t, body)
            }
            6 => ValueTerm::Reify(Box::new(self.comp(scope, d - 1))),
            _ => ValueTerm::prim(self.pick(PRIMS), self.value(scope, d - 1)),
        }
    }

    pub fn predicate(&mut self, scope: &[Name], d: u32) -> Predicate {
        let s = self.pick(&["s", "t", "w"]).to_string();
        let body = self.formula(&with(scope, &s), d);
        Predicate::new(s, body)
    }

    pub fn formula(&mut self, scope: &[Name], d: u32) -> Formula {
        let k = if d == 0 { self.rng.gen_range(0..4) } else { self.rng.gen_range(0..10) };
        match k {
            0 | 1 => Formula::rel(self.atom_term(scope, 1), self.atom_term(scope, 1)),
            2 => {
                let t = if self.coin(0.7) { ValueType::State } else { self.value_type(1) };
                Formula::eq(t, self.atom_term(scope, 1), self.atom_term(scope, 1))
            }
            3 => self.pick(&[Formula::Top, Formula::Bot]),
            4 => Formula::and(self.formula(scope, d - 1), self.formula(scope, d - 1)),
            5 => Formula::or(self.formula(scope, d - 1), self.formula(scope, d - 1)),
            6 => Formula::implies(self.formula(scope, d - 1), self.formula(scope, d - 1)),
            7 | 8 => {
                let x = self.binder();
                let t = if self.coin(0.7) { ValueType::State } else { self.value_type(1) };
                let body = self.formula(&with(scope, &x), d - 1);
                if k == 7 {
                    Formula::forall(x, t, body)
                } else {
                    Formula::exists(x, t, body)
                }
            }
            _ => Formula::Witnessed(self.predicate(scope, d - 1)),
        }
    }

    pub fn comp_type(&mut self, scope: &[Name], d: u32) -> CompType {
        let result = self.value_type(d.min(1));
        if self.coin(0.75) {
            let (s, x, s1) = ("s".to_string(), "x".to_string(), "s'".to_string());
            CompType::Mst {
                index: self.index(scope),
                result,
                pre: self.formula(&with(scope, &s), d.min(2)),
                pre_binder: s.clone(),
                post: self.formula(&[scope, &[s.clone(), x.clone(), s1.clone()]].concat(), d.min(2)),
                post_binders: (s, x, s1),
            }
        } else {
            let x = self.binder();
            CompType::Pure {
                result,
                pre: self.formula(scope, d.min(2)),
                post: self.formula(&with(scope, &x), d.min(2)),
                post_binder: x,
            }
        }
    }

    pub fn comp(&mut self, scope: &[Name], d: u32) -> CompTerm {
        use CompTerm::*;
        let k = if d == 0 { self.rng.gen_range(0..5) } else { self.rng.gen_range(0..14) };
        match k {
            0 => Return(self.index(scope), self.value(scope, d.min(1))),
            1 => PureReturn(self.value(scope, d.min(1))),
            2 => Get(self.index(scope)),
            3 => Put(self.index(scope), self.atom_term(scope, 1)),
            4 => {
                let p = self.predicate(scope, d.min(1));
                if self.coin(0.5) {
                    Witness(self.index(scope), p)
                } else {
                    Recall(self.index(scope), p)
                }
            }
            5 | 6 => {
                let x = self.binder();
                let e1 = self.comp(scope, d - 1);
                let e2 = self.comp(&with(scope, &x), d - 1);
                CompTerm::bind(x, e1, e2)
            }
            7 => {
                let f = match self.rng.gen_range(0..3) {
                    0 if !scope.is_empty() => ValueTerm::var(self.pick(scope)),
                    1 => ValueTerm::Reify(Box::new(self.comp(scope, d - 1))),
                    _ => {
                        let x = self.binder();
                        ValueTerm::lambda(x.clone(), self.value_type(1), self.comp(&with(scope, &x), d - 1))
                    }
                };
                App(f, self.atom_term(scope, 1))
            }
            8 => {
                let (a, b) = (self.binder(), self.binder());
                let body = self.comp(&[scope, &[a.clone(), b.clone()]].concat(), d - 1);
                PMatch(self.value(scope, d - 1), a, b, Box::new(body))
            }
            9 | 10 => {
                let (a, b) = (self.binder(), self.binder());
                let el = self.comp(&with(scope, &a), d - 1);
                let er = self.comp(&with(scope, &b), d - 1);
                Case(self.value(scope, d - 1), a, Box::new(el), b, Box::new(er))
            }
            11 => Reflect(self.value(scope, d - 1)),
            _ => Coerce(Box::new(self.comp(scope, d - 1))),
        }
    }

    // ---- well-behaved runnable terms --------------------------------------

    /// A closed, witness-free computation at index `true` over the counter
    /// domain that never gets stuck. `states` are bound state variables.
    pub fn runnable(&mut self, states: &[Name], d: u32) -> CompTerm {
        use CompTerm::*;
        let state = |g: &mut Gen| -> ValueTerm {
            let base = if !states.is_empty() && g.coin(0.7) { ValueTerm::var(g.pick(states)) } else { g.constant() };
            (0..g.rng.gen_range(0..3)).fold(base, |v, _| ValueTerm::prim("succ", v))
        };
        let k = if d == 0 { self.rng.gen_range(0..3) } else { self.rng.gen_range(0..9) };
        match k {
            0 => Get(ValueTerm::tt()),
            1 => Put(ValueTerm::tt(), state(self)),
            2 => Return(ValueTerm::tt(), state(self)),
            3 | 4 => {
                let x = fresh(states);
                let e1 = self.runnable(states, d - 1);
                // Only `get` and state-returning forms are known to bind a state.
                let binds_state = matches!(e1, Get(_) | Return(_, ValueTerm::Var(_) | ValueTerm::Const(_) | ValueTerm::Prim(..)));
                let inner = if binds_state { with(states, &x) } else { states.to_vec() };
                let e2 = self.runnable(&inner, d - 1);
                CompTerm::bind(x, e1, e2)
            }
            5 => {
                let b = if self.coin(0.5) { ValueTerm::tt() } else { ValueTerm::ff() };
                Case(b, "_".into(), Box::new(self.runnable(states, d - 1)), "_".into(), Box::new(self.runnable(states, d - 1)))
            }
            6 => {
                let (a, b) = (fresh(states), fresh(&with(states, &fresh(states))));
                let pair = ValueTerm::pair(state(self), state(self));
                let body = self.runnable(&[states, &[a.clone(), b.clone()]].concat(), d - 1);
                PMatch(pair, a, b, Box::new(body))
            }
            7 => {
                let y = fresh(states);
                let body = self.runnable(&with(states, &y), d - 1);
                App(ValueTerm::lambda(y, ValueType::State, body), state(self))
            }
            _ => {
                // A reflected state-passing step: `reflect (fun s -> return ((), succ s))`.
                let s = fresh(states);
                let next = ValueTerm::prim("succ", ValueTerm::var(&s));
                let f = ValueTerm::lambda(s, ValueType::State, PureReturn(ValueTerm::pair(ValueTerm::Unit, next)));
                Reflect(f)
            }
        }
    }

    // ---- sequents ----------------------------------------------------------

    fn ground_atom(&mut self, consts: &[&str]) -> Formula {
        let a = ValueTerm::constant(self.pick(consts));
        let b = ValueTerm::constant(self.pick(consts));
        if self.coin(0.8) {
            Formula::rel(a, b)
        } else {
            Formula::eq(ValueType::State, a, b)
        }
    }

    /// An atom mentioning the state variable `s` and the given constants.
    fn state_atom(&mut self, s: &str, consts: &[&str]) -> Formula {
        let c = ValueTerm::constant(self.pick(consts));
        let v = ValueTerm::var(s);
        match self.rng.gen_range(0..4) {
            0 | 1 => Formula::rel(c, v),
            2 => Formula::rel(v, c),
            _ => Formula::eq(ValueType::State, v, c),
        }
    }

    /// A candidate `Φ, witnessed(s.φ) ⊢ witnessed(s.φ')` with `Φ` atomic;
    /// `φ'` is built to follow from `φ` and `Φ` often, not always.
    pub fn inversion_candidate(&mut self) -> Sequent {
        let consts = ["c0", "c1", "c2"];
        let mut phi_atoms: Vec<Formula> = (0..self.rng.gen_range(1..3)).map(|_| self.state_atom("s", &consts)).collect();
        let mut gamma: Vec<Formula> = (0..self.rng.gen_range(0..3)).map(|_| self.ground_atom(&consts)).collect();
        let mut kept: Vec<Formula> = phi_atoms.iter().filter(|_| self.coin(0.5)).cloned().collect();
        let (a, b) = (ValueTerm::constant(self.pick(&consts)), ValueTerm::constant(self.pick(&consts)));
        let sv = ValueTerm::var("s");
        match self.rng.gen_range(0..5) {
            // Needs transitivity through a fact of Φ.
            0 => {
                gamma.push(Formula::rel(a.clone(), b.clone()));
                phi_atoms.push(Formula::rel(b, sv.clone()));
                kept.push(Formula::rel(a, sv.clone()));
            }
            // Needs transport along an equation of Φ.
            1 => {
                gamma.push(Formula::eq(ValueType::State, a.clone(), b.clone()));
                phi_atoms.push(Formula::rel(sv.clone(), a));
                kept.push(Formula::rel(sv.clone(), b));
            }
            // Needs an existential witness.
            2 => {
                phi_atoms.push(Formula::rel(a.clone(), sv.clone()));
                kept.push(Formula::exists("y", ValueType::State, Formula::and(Formula::rel(a, ValueTerm::var("y")), Formula::rel(ValueTerm::var("y"), sv.clone()))));
            }
            3 => kept.push(self.state_atom("s", &consts)),
            _ => kept.push(Formula::rel(sv.clone(), sv.clone())),
        }
        let phi = Formula::conj(phi_atoms);
        let phi1 = if self.coin(0.2) && kept.len() >= 2 { Formula::disj(kept) } else { Formula::conj(kept) };
        let s2 = self.pick(&["s", "t"]);
        let phi1 = phi1.subst("s", &ValueTerm::var(s2));
        gamma.push(Formula::Witnessed(Predicate::new("s", phi)));
        Sequent::from_formulas(TypingContext::new(), gamma, vec![Formula::Witnessed(Predicate::new(s2, phi1))])
    }

    /// A small ground formula over rel/== atoms, possibly witnessed.
    pub fn ground_formula(&mut self, consts: &[&str], d: u32) -> Formula {
        let k = if d == 0 { 0 } else { self.rng.gen_range(0..7) };
        match k {
            0 | 1 => self.ground_atom(consts),
            2 => Formula::and(self.ground_formula(consts, d - 1), self.ground_formula(consts, d - 1)),
            3 => Formula::or(self.ground_formula(consts, d - 1), self.ground_formula(consts, d - 1)),
            4 => Formula::implies(self.ground_formula(consts, d - 1), self.ground_formula(consts, d - 1)),
            5 => {
                let a = self.state_atom("x", consts);
                let b = self.state_atom("x", consts);
                Formula::exists("x", ValueType::State, Formula::and(a, b))
            }
            _ => {
                let a = self.state_atom("s", consts);
                Formula::Witnessed(Predicate::new("s", a))
            }
        }
    }

    /// A candidate cut `(Φ ⊢ A, Φ')`, `(Φ, A ⊢ Φ')` on `A`. Most candidates
    /// follow a lemma shape where `A` is derived from `Φ` and then used.
    pub fn cut_candidate(&mut self) -> (Sequent, Sequent, Formula) {
        let consts = ["c0", "c1", "c2"];
        let c = |g: &mut Gen| ValueTerm::constant(g.pick(&consts));
        let (a, b, d) = (c(self), c(self), c(self));
        let rel = Formula::rel;
        let x = ValueTerm::var("x");
        let (mut phi, cut, mut rest) = match self.rng.gen_range(0..7) {
            0 => (
                vec![rel(a.clone(), b.clone()), rel(b.clone(), d.clone())],
                rel(a.clone(), d.clone()),
                vec![Formula::exists("x", ValueType::State, Formula::and(rel(a.clone(), x.clone()), rel(x.clone(), d.clone())))],
            ),
            1 => (
                vec![Formula::eq(ValueType::State, a.clone(), b.clone()), rel(b.clone(), d.clone())],
                rel(a.clone(), d.clone()),
                vec![Formula::or(rel(a.clone(), d.clone()), rel(d.clone(), a.clone()))],
            ),
            2 => (
                vec![rel(a.clone(), b.clone())],
                Formula::exists("x", ValueType::State, rel(a.clone(), x.clone())),
                vec![Formula::exists("x", ValueType::State, Formula::or(rel(a.clone(), x.clone()), rel(x.clone(), a.clone())))],
            ),
            3 => (
                vec![Formula::implies(rel(a.clone(), b.clone()), rel(b.clone(), d.clone())), rel(a.clone(), b.clone())],
                rel(b.clone(), d.clone()),
                vec![Formula::and(rel(b.clone(), d.clone()), rel(a.clone(), b.clone()))],
            ),
            4 => {
                let both = Formula::Witnessed(Predicate::new(
                    "s",
                    Formula::and(rel(a.clone(), ValueTerm::var("s")), rel(b.clone(), ValueTerm::var("s"))),
                ));
                let one = Formula::Witnessed(Predicate::new("s", rel(a.clone(), ValueTerm::var("s"))));
                let either = Formula::Witnessed(Predicate::new(
                    "t",
                    Formula::or(rel(a.clone(), ValueTerm::var("t")), rel(d.clone(), ValueTerm::var("t"))),
                ));
                (vec![both], one, vec![either])
            }
            5 => {
                let phi: Vec<Formula> = (0..self.rng.gen_range(1..4)).map(|_| self.ground_formula(&consts, 1)).collect();
                let cut = Formula::conj(phi.iter().filter(|_| self.coin(0.7)).cloned().collect());
                let rest = vec![Formula::or(cut.clone(), self.ground_atom(&consts))];
                (phi, cut, rest)
            }
            _ => {
                let phi: Vec<Formula> = (0..self.rng.gen_range(1..4)).map(|_| self.ground_formula(&consts, 1)).collect();
                let cut = self.ground_formula(&consts, 2);
                (phi, cut, vec![self.ground_formula(&consts, 1)])
            }
        };
        if self.coin(0.3) {
            phi.push(self.ground_atom(&consts));
        }
        if self.coin(0.3) {
            rest.push(self.ground_atom(&consts));
        }
        let ctx = TypingContext::new();
        let s1 = Sequent::from_formulas(ctx.clone(), phi.clone(), [vec![cut.clone()], rest.clone()].concat());
        let s2 = Sequent::from_formulas(ctx, [phi, vec![cut.clone()]].concat(), rest);
        (s1, s2, cut)
    }

    /// A random ground sequent of small size.
    pub fn sequent(&mut self) -> Sequent {
        let consts = ["c0", "c1", "c2"];
        let left = (0..self.rng.gen_range(0..3)).map(|_| self.ground_formula(&consts, 2)).collect();
        let right = (0..self.rng.gen_range(1..3)).map(|_| self.ground_formula(&consts, 2)).collect();
        Sequent::from_formulas(TypingContext::new(), left, right)
    }
}

fn with(scope: &[Name], x: &str) -> Vec<Name> {
    let mut v = scope.to_vec();
    v.push(x.to_string());
    v
}

fn fresh(taken: &[Name]) -> Name {
    fresh_name("v", |c| taken.iter().any(|t| t == c))
}
