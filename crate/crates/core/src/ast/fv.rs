use std::collections::BTreeSet;

use super::*;

/// Free-variable computation. Constants are closed.
pub trait FreeVars {
    fn collect_fv(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>);

    fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_fv(&mut Vec::new(), &mut out);
        out
    }

    fn has_free(&self, x: &str) -> bool {
        self.free_vars().contains(x)
    }
}

fn under<T: FreeVars + ?Sized>(x: &Name, body: &T, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
    bound.push(x.clone());
    body.collect_fv(bound, out);
    bound.pop();
}

impl FreeVars for ValueType {
    fn collect_fv(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            ValueType::State | ValueType::Unit => {}
            ValueType::Prod(a, b) | ValueType::Sum(a, b) => {
                a.collect_fv(bound, out);
                b.collect_fv(bound, out);
            }
            ValueType::Arrow(x, dom, cod) => {
                dom.collect_fv(bound, out);
                under(x, cod.as_ref(), bound, out);
            }
        }
    }
}

impl FreeVars for CompType {
    fn collect_fv(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            CompType::Mst { index, result, pre_binder, pre, post_binders, post } => {
                index.collect_fv(bound, out);
                result.collect_fv(bound, out);
                under(pre_binder, pre, bound, out);
                let (s, x, s1) = post_binders;
                let n = bound.len();
                bound.extend([s.clone(), x.clone(), s1.clone()]);
                post.collect_fv(bound, out);
                bound.truncate(n);
            }
            CompType::Pure { result, pre, post_binder, post } => {
                result.collect_fv(bound, out);
                pre.collect_fv(bound, out);
                under(post_binder, post, bound, out);
            }
        }
    }
}

impl FreeVars for ValueTerm {
    fn collect_fv(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            ValueTerm::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            ValueTerm::Const(_) | ValueTerm::Unit => {}
            ValueTerm::Pair(a, b) => {
                a.collect_fv(bound, out);
                b.collect_fv(bound, out);
            }
            ValueTerm::Inl(v, t) | ValueTerm::Inr(v, t) => {
                v.collect_fv(bound, out);
                t.collect_fv(bound, out);
            }
            ValueTerm::Lambda(x, t, body) => {
                t.collect_fv(bound, out);
                under(x, body.as_ref(), bound, out);
            }
            ValueTerm::Reify(e) => e.collect_fv(bound, out),
            ValueTerm::Prim(_, v) => v.collect_fv(bound, out),
        }
    }
}

impl FreeVars for CompTerm {
    fn collect_fv(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        use CompTerm::*;
        match self {
            Return(b, v) | Put(b, v) => {
                b.collect_fv(bound, out);
                v.collect_fv(bound, out);
            }
            PureReturn(v) | Reflect(v) | Get(v) => v.collect_fv(bound, out),
            Bind(x, e1, e2) => {
                e1.collect_fv(bound, out);
                under(x, e2.as_ref(), bound, out);
            }
            App(f, a) => {
                f.collect_fv(bound, out);
                a.collect_fv(bound, out);
            }
            PMatch(v, x1, x2, e) => {
                v.collect_fv(bound, out);
                let n = bound.len();
                bound.extend([x1.clone(), x2.clone()]);
                e.collect_fv(bound, out);
                bound.truncate(n);
            }
            Case(v, xl, el, xr, er) => {
                v.collect_fv(bound, out);
                under(xl, el.as_ref(), bound, out);
                under(xr, er.as_ref(), bound, out);
            }
            Witness(b, p) | Recall(b, p) => {
                b.collect_fv(bound, out);
                p.collect_fv(bound, out);
            }
            Coerce(e) | Located(_, e) => e.collect_fv(bound, out),
        }
    }
}

impl FreeVars for Formula {
    fn collect_fv(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Formula::Atom(head, args) => {
                if let AtomHead::Eq(t) = head {
                    t.collect_fv(bound, out);
                }
                for a in args {
                    a.collect_fv(bound, out);
                }
            }
            Formula::Top | Formula::Bot => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_fv(bound, out);
                b.collect_fv(bound, out);
            }
            Formula::Forall(x, t, body) | Formula::Exists(x, t, body) => {
                t.collect_fv(bound, out);
                under(x, body.as_ref(), bound, out);
            }
            Formula::Witnessed(p) => p.collect_fv(bound, out),
        }
    }
}

impl FreeVars for Predicate {
    fn collect_fv(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        under(&self.binder, self.body.as_ref(), bound, out);
    }
}

/// A variant of `base` for which `taken` is false. Returns `base` itself when
/// it is free; otherwise appends a numeric suffix to its alphabetic stem.
pub fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> Name {
    if !taken(base) {
        return base.to_string();
    }
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit() || c == '\'');
    let stem = if stem.is_empty() { "v" } else { stem };
    (1..)
        .map(|i| format!("{stem}{i}"))
        .find(|cand| !taken(cand))
        .expect("unbounded supply of names")
}
