use super::*;

/// Paired binder environments for comparing two terms.
#[derive(Default)]
pub struct Env {
    left: Vec<Name>,
    right: Vec<Name>,
}

impl Env {
    fn var(&self, x: &str, y: &str) -> bool {
        let i = self.left.iter().rposition(|n| n == x);
        let j = self.right.iter().rposition(|n| n == y);
        match (i, j) {
            (Some(i), Some(j)) => i == j,
            (None, None) => x == y,
            _ => false,
        }
    }

    fn with<R>(&mut self, pairs: &[(&Name, &Name)], f: impl FnOnce(&mut Env) -> R) -> R {
        for (a, b) in pairs {
            self.left.push((*a).clone());
            self.right.push((*b).clone());
        }
        let r = f(self);
        for _ in pairs {
            self.left.pop();
            self.right.pop();
        }
        r
    }
}

/// Equality up to consistent renaming of bound variables. Location markers are
/// ignored.
pub trait AlphaEq {
    fn alpha(&self, other: &Self, env: &mut Env) -> bool;
}

pub fn alpha_eq<T: AlphaEq>(a: &T, b: &T) -> bool {
    a.alpha(b, &mut Env::default())
}

impl AlphaEq for ValueType {
    fn alpha(&self, other: &Self, env: &mut Env) -> bool {
        use ValueType::*;
        match (self, other) {
            (State, State) | (Unit, Unit) => true,
            (Prod(a, b), Prod(c, d)) | (Sum(a, b), Sum(c, d)) => a.alpha(c, env) && b.alpha(d, env),
            (Arrow(x, t, c), Arrow(y, u, d)) => t.alpha(u, env) && env.with(&[(x, y)], |e| c.alpha(d, e)),
            _ => false,
        }
    }
}

impl AlphaEq for CompType {
    fn alpha(&self, other: &Self, env: &mut Env) -> bool {
        match (self, other) {
            (
                CompType::Mst { index: i1, result: r1, pre_binder: p1, pre: pre1, post_binders: b1, post: post1 },
                CompType::Mst { index: i2, result: r2, pre_binder: p2, pre: pre2, post_binders: b2, post: post2 },
            ) => {
                i1.alpha(i2, env)
                    && r1.alpha(r2, env)
                    && env.with(&[(p1, p2)], |e| pre1.alpha(pre2, e))
                    && env.with(&[(&b1.0, &b2.0), (&b1.1, &b2.1), (&b1.2, &b2.2)], |e| post1.alpha(post2, e))
            }
            (
                CompType::Pure { result: r1, pre: pre1, post_binder: x1, post: post1 },
                CompType::Pure { result: r2, pre: pre2, post_binder: x2, post: post2 },
            ) => r1.alpha(r2, env) && pre1.alpha(pre2, env) && env.with(&[(x1, x2)], |e| post1.alpha(post2, e)),
            _ => false,
        }
    }
}

impl AlphaEq for ValueTerm {
    fn alpha(&self, other: &Self, env: &mut Env) -> bool {
        use ValueTerm::*;
        match (self, other) {
            (Var(x), Var(y)) => env.var(x, y),
            (Const(a), Const(b)) => a == b,
            (Unit, Unit) => true,
            (Pair(a, b), Pair(c, d)) => a.alpha(c, env) && b.alpha(d, env),
            (Inl(a, t), Inl(b, u)) | (Inr(a, t), Inr(b, u)) => a.alpha(b, env) && t.alpha(u, env),
            (Lambda(x, t, e1), Lambda(y, u, e2)) => t.alpha(u, env) && env.with(&[(x, y)], |e| e1.alpha(e2, e)),
            (Reify(a), Reify(b)) => a.alpha(b, env),
            (Prim(p, a), Prim(q, b)) => p == q && a.alpha(b, env),
            _ => false,
        }
    }
}

impl AlphaEq for CompTerm {
    fn alpha(&self, other: &Self, env: &mut Env) -> bool {
        use CompTerm::*;
        match (self.unlocated(), other.unlocated()) {
            (Return(b1, v1), Return(b2, v2)) | (Put(b1, v1), Put(b2, v2)) => b1.alpha(b2, env) && v1.alpha(v2, env),
            (PureReturn(a), PureReturn(b)) | (Get(a), Get(b)) | (Reflect(a), Reflect(b)) => a.alpha(b, env),
            (Bind(x, a1, a2), Bind(y, b1, b2)) => a1.alpha(b1, env) && env.with(&[(x, y)], |e| a2.alpha(b2, e)),
            (App(f1, a1), App(f2, a2)) => f1.alpha(f2, env) && a1.alpha(a2, env),
            (PMatch(v1, x1, x2, e1), PMatch(v2, y1, y2, e2)) => {
                v1.alpha(v2, env) && env.with(&[(x1, y1), (x2, y2)], |e| e1.alpha(e2, e))
            }
            (Case(v1, xl, el, xr, er), Case(v2, yl, fl, yr, fr)) => {
                v1.alpha(v2, env)
                    && env.with(&[(xl, yl)], |e| el.alpha(fl, e))
                    && env.with(&[(xr, yr)], |e| er.alpha(fr, e))
            }
            (Witness(b1, p1), Witness(b2, p2)) | (Recall(b1, p1), Recall(b2, p2)) => {
                b1.alpha(b2, env) && p1.alpha(p2, env)
            }
            (Coerce(a), Coerce(b)) => a.alpha(b, env),
            _ => false,
        }
    }
}

impl AlphaEq for Formula {
    fn alpha(&self, other: &Self, env: &mut Env) -> bool {
        use Formula::*;
        match (self, other) {
            (Atom(h1, a1), Atom(h2, a2)) => {
                let heads = match (h1, h2) {
                    (AtomHead::Rel, AtomHead::Rel) => true,
                    (AtomHead::Eq(t), AtomHead::Eq(u)) => t.alpha(u, env),
                    _ => false,
                };
                heads && a1.len() == a2.len() && a1.iter().zip(a2).all(|(x, y)| x.alpha(y, env))
            }
            (Top, Top) | (Bot, Bot) => true,
            (And(a, b), And(c, d)) | (Or(a, b), Or(c, d)) | (Implies(a, b), Implies(c, d)) => {
                a.alpha(c, env) && b.alpha(d, env)
            }
            (Forall(x, t, a), Forall(y, u, b)) | (Exists(x, t, a), Exists(y, u, b)) => {
                t.alpha(u, env) && env.with(&[(x, y)], |e| a.alpha(b, e))
            }
            (Witnessed(p), Witnessed(q)) => p.alpha(q, env),
            _ => false,
        }
    }
}

impl AlphaEq for Predicate {
    fn alpha(&self, other: &Self, env: &mut Env) -> bool {
        env.with(&[(&self.binder, &other.binder)], |e| self.body.alpha(&other.body, e))
    }
}

impl<T: AlphaEq> AlphaEq for Vec<T> {
    fn alpha(&self, other: &Self, env: &mut Env) -> bool {
        self.len() == other.len() && self.iter().zip(other).all(|(a, b)| a.alpha(b, env))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: ValueTerm, b: ValueTerm) -> Formula {
        Formula::rel(a, b)
    }

    #[test]
    fn renamed_predicate_binder() {
        let c0 = ValueTerm::constant("c0");
        let p = Predicate::new("s", rel(c0.clone(), ValueTerm::var("s")));
        let q = Predicate::new("t", rel(c0.clone(), ValueTerm::var("t")));
        assert!(alpha_eq(&p, &q));
        let r = Predicate::new("s", rel(ValueTerm::var("s"), c0));
        assert!(!alpha_eq(&p, &r));
    }

    #[test]
    fn renamed_lambda_binder() {
        let l1 = ValueTerm::lambda("x", ValueType::Unit, CompTerm::Return(ValueTerm::ff(), ValueTerm::var("x")));
        let l2 = ValueTerm::lambda("y", ValueType::Unit, CompTerm::Return(ValueTerm::ff(), ValueTerm::var("y")));
        assert!(alpha_eq(&l1, &l2));
    }

    #[test]
    fn free_and_bound_do_not_mix() {
        // forall x. rel x y  vs  forall y. rel y y
        let a = Formula::forall("x", ValueType::State, rel(ValueTerm::var("x"), ValueTerm::var("y")));
        let b = Formula::forall("y", ValueType::State, rel(ValueTerm::var("y"), ValueTerm::var("y")));
        assert!(!alpha_eq(&a, &b));
    }

    #[test]
    fn shadowing_resolves_innermost() {
        // forall x. forall x. rel x x  ~  forall a. forall b. rel b b
        let a = Formula::forall(
            "x",
            ValueType::State,
            Formula::forall("x", ValueType::State, rel(ValueTerm::var("x"), ValueTerm::var("x"))),
        );
        let b = Formula::forall(
            "a",
            ValueType::State,
            Formula::forall("b", ValueType::State, rel(ValueTerm::var("b"), ValueTerm::var("b"))),
        );
        assert!(alpha_eq(&a, &b));
    }
}
