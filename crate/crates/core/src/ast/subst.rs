use std::collections::BTreeSet;

use super::*;

/// A simultaneous, capture-avoiding substitution of value terms for variables.
#[derive(Clone, Debug, Default)]
pub struct Subst {
    map: Vec<(Name, ValueTerm)>,
}

impl Subst {
    pub fn new() -> Self {
        Subst::default()
    }

    pub fn single(x: impl Into<Name>, v: ValueTerm) -> Self {
        Subst { map: vec![(x.into(), v)] }
    }

    pub fn with(mut self, x: impl Into<Name>, v: ValueTerm) -> Self {
        self.insert(x.into(), v);
        self
    }

    pub fn insert(&mut self, x: Name, v: ValueTerm) {
        self.map.retain(|(y, _)| *y != x);
        self.map.push((x, v));
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    fn get(&self, x: &str) -> Option<&ValueTerm> {
        self.map.iter().find(|(y, _)| y == x).map(|(_, v)| v)
    }

    fn range_fv(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for (_, v) in &self.map {
            out.extend(v.free_vars());
        }
        out
    }

    /// Enters the scope of binder `x`; returns the (possibly renamed) binder
    /// and the substitution to apply underneath it.
    fn enter(&self, x: &Name, body_fv: &BTreeSet<Name>, also_avoid: &[Name]) -> (Name, Subst) {
        let mut inner = self.clone();
        inner.map.retain(|(y, _)| y != x);
        if inner.map.is_empty() {
            return (x.clone(), inner);
        }
        let range = inner.range_fv();
        if !range.contains(x) && !also_avoid.contains(x) {
            return (x.clone(), inner);
        }
        let keys: Vec<Name> = inner.map.iter().map(|(k, _)| k.clone()).collect();
        let fresh = fresh_name(x, |c| {
            range.contains(c) || body_fv.contains(c) || keys.iter().any(|k| k == c) || also_avoid.iter().any(|a| a == c)
        });
        inner.map.push((x.clone(), ValueTerm::Var(fresh.clone())));
        (fresh, inner)
    }
}

pub trait Substitute: Sized {
    fn subst_many(&self, s: &Subst) -> Self;

    /// `self[v/x]`.
    fn subst(&self, x: &str, v: &ValueTerm) -> Self {
        self.subst_many(&Subst::single(x, v.clone()))
    }

    /// Renames free occurrences of variable `from` to `to`.
    fn rename(&self, from: &str, to: &str) -> Self {
        if from == to {
            return self.subst_many(&Subst::new());
        }
        self.subst(from, &ValueTerm::Var(to.to_string()))
    }
}

impl Substitute for ValueType {
    fn subst_many(&self, s: &Subst) -> Self {
        if s.is_empty() {
            return self.clone();
        }
        match self {
            ValueType::State | ValueType::Unit => self.clone(),
            ValueType::Prod(a, b) => ValueType::prod(a.subst_many(s), b.subst_many(s)),
            ValueType::Sum(a, b) => ValueType::sum(a.subst_many(s), b.subst_many(s)),
            ValueType::Arrow(x, dom, cod) => {
                let (x2, inner) = s.enter(x, &cod.free_vars(), &[]);
                ValueType::arrow(x2, dom.subst_many(s), cod.subst_many(&inner))
            }
        }
    }
}

impl Substitute for CompType {
    fn subst_many(&self, s: &Subst) -> Self {
        if s.is_empty() {
            return self.clone();
        }
        match self {
            CompType::Mst { index, result, pre_binder, pre, post_binders, post } => {
                let (pb, pre_s) = s.enter(pre_binder, &pre.free_vars(), &[]);
                let post_fv = post.free_vars();
                let (b0, s0) = s.enter(&post_binders.0, &post_fv, &[]);
                let (b1, s1) = s0.enter(&post_binders.1, &post_fv, std::slice::from_ref(&b0));
                let (b2, s2) = s1.enter(&post_binders.2, &post_fv, &[b0.clone(), b1.clone()]);
                CompType::Mst {
                    index: index.subst_many(s),
                    result: result.subst_many(s),
                    pre_binder: pb,
                    pre: pre.subst_many(&pre_s),
                    post_binders: (b0, b1, b2),
                    post: post.subst_many(&s2),
                }
            }
            CompType::Pure { result, pre, post_binder, post } => {
                let (pb, inner) = s.enter(post_binder, &post.free_vars(), &[]);
                CompType::Pure {
                    result: result.subst_many(s),
                    pre: pre.subst_many(s),
                    post_binder: pb,
                    post: post.subst_many(&inner),
                }
            }
        }
    }
}

impl Substitute for ValueTerm {
    fn subst_many(&self, s: &Subst) -> Self {
        if s.is_empty() {
            return self.clone();
        }
        match self {
            ValueTerm::Var(x) => s.get(x).cloned().unwrap_or_else(|| self.clone()),
            ValueTerm::Const(_) | ValueTerm::Unit => self.clone(),
            ValueTerm::Pair(a, b) => ValueTerm::pair(a.subst_many(s), b.subst_many(s)),
            ValueTerm::Inl(v, t) => ValueTerm::inl(v.subst_many(s), t.subst_many(s)),
            ValueTerm::Inr(v, t) => ValueTerm::inr(v.subst_many(s), t.subst_many(s)),
            ValueTerm::Lambda(x, t, body) => {
                let (x2, inner) = s.enter(x, &body.free_vars(), &[]);
                ValueTerm::lambda(x2, t.subst_many(s), body.subst_many(&inner))
            }
            ValueTerm::Reify(e) => ValueTerm::Reify(Box::new(e.subst_many(s))),
            ValueTerm::Prim(p, v) => ValueTerm::prim(p.clone(), v.subst_many(s)),
        }
    }
}

impl Substitute for CompTerm {
    fn subst_many(&self, s: &Subst) -> Self {
        use CompTerm::*;
        if s.is_empty() {
            return self.clone();
        }
        match self {
            Return(b, v) => Return(b.subst_many(s), v.subst_many(s)),
            PureReturn(v) => PureReturn(v.subst_many(s)),
            Bind(x, e1, e2) => {
                let (x2, inner) = s.enter(x, &e2.free_vars(), &[]);
                CompTerm::bind(x2, e1.subst_many(s), e2.subst_many(&inner))
            }
            App(f, a) => App(f.subst_many(s), a.subst_many(s)),
            PMatch(v, x1, x2, e) => {
                let fv = e.free_vars();
                let (y1, s1) = s.enter(x1, &fv, &[]);
                let (y2, s2) = s1.enter(x2, &fv, std::slice::from_ref(&y1));
                PMatch(v.subst_many(s), y1, y2, Box::new(e.subst_many(&s2)))
            }
            Case(v, xl, el, xr, er) => {
                let (yl, sl) = s.enter(xl, &el.free_vars(), &[]);
                let (yr, sr) = s.enter(xr, &er.free_vars(), &[]);
                Case(v.subst_many(s), yl, Box::new(el.subst_many(&sl)), yr, Box::new(er.subst_many(&sr)))
            }
            Get(b) => Get(b.subst_many(s)),
            Put(b, v) => Put(b.subst_many(s), v.subst_many(s)),
            Witness(b, p) => Witness(b.subst_many(s), p.subst_many(s)),
            Recall(b, p) => Recall(b.subst_many(s), p.subst_many(s)),
            Reflect(v) => Reflect(v.subst_many(s)),
            Coerce(e) => Coerce(Box::new(e.subst_many(s))),
            Located(p, e) => Located(*p, Box::new(e.subst_many(s))),
        }
    }
}

impl Substitute for Formula {
    fn subst_many(&self, s: &Subst) -> Self {
        if s.is_empty() {
            return self.clone();
        }
        match self {
            Formula::Atom(head, args) => {
                let head = match head {
                    AtomHead::Rel => AtomHead::Rel,
                    AtomHead::Eq(t) => AtomHead::Eq(t.subst_many(s)),
                };
                Formula::Atom(head, args.iter().map(|a| a.subst_many(s)).collect())
            }
            Formula::Top | Formula::Bot => self.clone(),
            Formula::And(a, b) => Formula::and(a.subst_many(s), b.subst_many(s)),
            Formula::Or(a, b) => Formula::or(a.subst_many(s), b.subst_many(s)),
            Formula::Implies(a, b) => Formula::implies(a.subst_many(s), b.subst_many(s)),
            Formula::Forall(x, t, body) => {
                let (x2, inner) = s.enter(x, &body.free_vars(), &[]);
                Formula::forall(x2, t.subst_many(s), body.subst_many(&inner))
            }
            Formula::Exists(x, t, body) => {
                let (x2, inner) = s.enter(x, &body.free_vars(), &[]);
                Formula::exists(x2, t.subst_many(s), body.subst_many(&inner))
            }
            Formula::Witnessed(p) => Formula::Witnessed(p.subst_many(s)),
        }
    }
}

impl Substitute for Predicate {
    fn subst_many(&self, s: &Subst) -> Self {
        let (b, inner) = s.enter(&self.binder, &self.body.free_vars(), &[]);
        Predicate::new(b, self.body.subst_many(&inner))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &str) -> ValueTerm {
        ValueTerm::var(x)
    }

    #[test]
    fn replaces_free_occurrence() {
        let f = Formula::rel(v("s"), v("x"));
        let g = f.subst("x", &ValueTerm::constant("c0"));
        assert_eq!(g, Formula::rel(v("s"), ValueTerm::constant("c0")));
    }

    #[test]
    fn shadowed_binder_is_untouched() {
        let f = Formula::forall("s", ValueType::State, Formula::rel(v("s"), v("x")));
        assert_eq!(f.subst("s", &ValueTerm::constant("c0")), f);
    }

    #[test]
    fn put_post_instantiation() {
        // s' == σ with σ := c1, then s' := c1
        let post = Formula::eq(ValueType::State, v("s'"), v("sigma"));
        let g = post.subst("sigma", &ValueTerm::constant("c1")).subst("s'", &ValueTerm::constant("c1"));
        assert_eq!(g, Formula::eq(ValueType::State, ValueTerm::constant("c1"), ValueTerm::constant("c1")));
    }

    #[test]
    fn avoids_capture() {
        // (forall y. rel x y)[y/x] must not capture.
        let f = Formula::forall("y", ValueType::State, Formula::rel(v("x"), v("y")));
        let g = f.subst("x", &v("y"));
        match &g {
            Formula::Forall(b, _, body) => {
                assert_ne!(b, "y");
                assert_eq!(**body, Formula::rel(v("y"), v(b)));
            }
            _ => panic!(),
        }
        assert!(g.free_vars().contains("y"));
    }

    #[test]
    fn simultaneous_swap() {
        let f = Formula::rel(v("a"), v("b"));
        let s = Subst::new().with("a", v("b")).with("b", v("a"));
        assert_eq!(f.subst_many(&s), Formula::rel(v("b"), v("a")));
    }
}
