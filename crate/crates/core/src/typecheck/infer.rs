use std::collections::BTreeSet;

use crate::ast::*;
use crate::domains::StateDomain;
use crate::logic::{stable_formula, FormulaSet, Sequent};

use super::{Obligation, TypeError, TypingContext};

fn var(x: &str) -> ValueTerm {
    ValueTerm::var(x)
}

fn fresh(base: &str, taken: &BTreeSet<Name>) -> Name {
    let base = if base == "_" { "u" } else { base };
    fresh_name(base, |c| taken.contains(c))
}

/// Conjunction that drops `⊤` conjuncts.
fn and_all(fs: Vec<Formula>) -> Formula {
    Formula::conj(fs.into_iter().filter(|f| *f != Formula::Top).collect())
}

/// `(b == false) ==> φ`, collapsed when `b` is a literal.
fn guarded(b: &ValueTerm, f: Formula) -> Formula {
    match b.as_bool() {
        Some(false) => f,
        Some(true) => Formula::Top,
        None => Formula::implies(Formula::eq(ValueType::bool(), b.clone(), ValueTerm::ff()), f),
    }
}

fn mst(index: ValueTerm, result: ValueType, s: &str, pre: Formula, (s0, x, s1): (&str, &str, &str), post: Formula) -> CompType {
    CompType::Mst {
        index,
        result,
        pre_binder: s.to_string(),
        pre,
        post_binders: (s0.to_string(), x.to_string(), s1.to_string()),
        post,
    }
}

/// `Pure t pre (x. post)` as `MST⟨b⟩ t (s. pre) (s x s'. s == s' ∧ post)`.
fn lift(ctx: &TypingContext, c: &CompType, index: &ValueTerm) -> CompType {
    let mut names = Names::of(ctx, &[c, index]);
    let (s, x, s1) = (names.fresh("s"), names.fresh("x"), names.fresh("s'"));
    let (pre, post) = open_pure(c, &x);
    let post = and_all(vec![Formula::eq(ValueType::State, var(&s), var(&s1)), post]);
    mst(index.clone(), c.result().clone(), &s, pre, (&s, &x, &s1), post)
}

/// Pre- and postcondition of an `MST` type with its binders renamed to the
/// given (fresh) names.
fn open_mst(c: &CompType, s: &str, x: &str, s1: &str) -> (Formula, Formula) {
    let CompType::Mst { pre_binder, pre, post_binders: (b0, bx, b1), post, .. } = c else {
        unreachable!("open_mst on a Pure type")
    };
    let pre = pre.subst(pre_binder, &var(s));
    let post = post.subst_many(&Subst::single(b0.clone(), var(s)).with(bx.clone(), var(x)).with(b1.clone(), var(s1)));
    (pre, post)
}

fn open_pure(c: &CompType, y: &str) -> (Formula, Formula) {
    let CompType::Pure { pre, post_binder, post, .. } = c else { unreachable!("open_pure on an MST type") };
    (pre.clone(), post.subst(post_binder, &var(y)))
}

/// Typing and subtyping with obligation collection.
pub struct Checker<'d> {
    dom: Option<&'d StateDomain>,
    obligations: Vec<Obligation>,
    pos: Option<Pos>,
}

impl<'d> Checker<'d> {
    /// With a domain, state constants and primitives are checked against it.
    pub fn new(dom: Option<&'d StateDomain>) -> Self {
        Checker { dom, obligations: Vec::new(), pos: None }
    }

    /// Position attributed to obligations raised outside any located term.
    pub fn set_pos(&mut self, pos: Option<Pos>) {
        self.pos = pos;
    }

    pub fn take_obligations(&mut self) -> Vec<Obligation> {
        std::mem::take(&mut self.obligations)
    }

    pub fn obligations(&self) -> &[Obligation] {
        &self.obligations
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, TypeError> {
        Err(TypeError { pos: self.pos, message: msg.into() })
    }

    fn scratch(&self) -> Checker<'d> {
        Checker { dom: self.dom, obligations: Vec::new(), pos: self.pos }
    }

    fn oblige(&mut self, ctx: TypingContext, left: Vec<Formula>, right: Formula, rule: &str) {
        let left = FormulaSet::from_vec(left.into_iter().filter(|f| *f != Formula::Top).collect());
        let sequent = Sequent::new(ctx, left, FormulaSet::from_vec(vec![right]));
        self.obligations.push(Obligation { sequent, rule: rule.to_string(), pos: self.pos });
    }

    /// Extends `ctx` with `x`, renaming `x` when it is already bound.
    fn bind_fresh(&self, ctx: &TypingContext, x: &str, avoid: &BTreeSet<Name>) -> Name {
        if x != "_" && !ctx.contains(x) && !avoid.contains(x) {
            return x.to_string();
        }
        let mut taken = ctx.all_names();
        taken.extend(avoid.iter().cloned());
        fresh(x, &taken)
    }

    // ---- well-formedness --------------------------------------------------

    pub fn wf_type(&self, ctx: &TypingContext, t: &ValueType) -> Result<(), TypeError> {
        match t {
            ValueType::State | ValueType::Unit => Ok(()),
            ValueType::Prod(a, b) | ValueType::Sum(a, b) => {
                self.wf_type(ctx, a)?;
                self.wf_type(ctx, b)
            }
            ValueType::Arrow(x, a, c) => {
                self.wf_type(ctx, a)?;
                let y = self.bind_fresh(ctx, x, &BTreeSet::new());
                self.wf_comp_type(&ctx.with(y.clone(), (**a).clone()), &c.rename(x, &y))
            }
        }
    }

    pub fn wf_comp_type(&self, ctx: &TypingContext, c: &CompType) -> Result<(), TypeError> {
        match c {
            CompType::Mst { index, result, post_binders: (b0, bx, b1), .. } => {
                self.check_index(ctx, index)?;
                self.wf_type(ctx, result)?;
                if b0 == bx || b0 == b1 || bx == b1 {
                    return self.err(format!("postcondition binders `{b0} {bx} {b1}` must be distinct"));
                }
                let mut names = Names::of(ctx, &[c]);
                let (s, x, s1) = (names.fresh("s"), names.fresh("x"), names.fresh("s'"));
                let (pre, post) = open_mst(c, &s, &x, &s1);
                let cs = ctx.with(s.clone(), ValueType::State);
                self.wf_formula(&cs, &pre)?;
                self.wf_formula(&cs.with(x, result.clone()).with(s1, ValueType::State), &post)
            }
            CompType::Pure { result, pre, .. } => {
                self.wf_type(ctx, result)?;
                self.wf_formula(ctx, pre)?;
                let y = Names::of(ctx, &[c]).fresh("y");
                let (_, post) = open_pure(c, &y);
                self.wf_formula(&ctx.with(y, result.clone()), &post)
            }
        }
    }

    fn check_index(&self, ctx: &TypingContext, b: &ValueTerm) -> Result<(), TypeError> {
        let t = self.scratch().infer_value(ctx, b)?;
        if !t.is_bool() {
            return self.err(format!("effect index `{b}` has type {t}, expected bool"));
        }
        Ok(())
    }

    fn term_of_type(&self, ctx: &TypingContext, v: &ValueTerm, t: &ValueType) -> Result<(), TypeError> {
        let mut sc = self.scratch();
        let found = sc.infer_value(ctx, v)?;
        if sc.sub_value(ctx, &found, t).is_err() {
            return self.err(format!("`{v}` has type {found}, expected {t}"));
        }
        Ok(())
    }

    pub fn wf_formula(&self, ctx: &TypingContext, f: &Formula) -> Result<(), TypeError> {
        match f {
            Formula::Top | Formula::Bot => Ok(()),
            Formula::Atom(head, args) => {
                let (name, t) = match head {
                    AtomHead::Rel => ("rel", ValueType::State),
                    AtomHead::Eq(t) => {
                        self.wf_type(ctx, t)?;
                        ("==", t.clone())
                    }
                };
                if args.len() != 2 {
                    return self.err(format!("`{name}` expects 2 arguments, got {}", args.len()));
                }
                for a in args {
                    self.term_of_type(ctx, a, &t)?;
                }
                Ok(())
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                self.wf_formula(ctx, a)?;
                self.wf_formula(ctx, b)
            }
            Formula::Forall(x, t, body) | Formula::Exists(x, t, body) => {
                self.wf_type(ctx, t)?;
                let y = self.bind_fresh(ctx, x, &BTreeSet::new());
                self.wf_formula(&ctx.with(y.clone(), t.clone()), &body.rename(x, &y))
            }
            Formula::Witnessed(p) => {
                let y = self.bind_fresh(ctx, &p.binder, &BTreeSet::new());
                self.wf_formula(&ctx.with(y.clone(), ValueType::State), &p.apply(&var(&y)))
            }
        }
    }
}

/// Supply of names fresh for a context and some syntax.
struct Names(BTreeSet<Name>);

impl Names {
    fn of(ctx: &TypingContext, extra: &[&dyn FreeVarsDyn]) -> Self {
        let mut t = ctx.all_names();
        for e in extra {
            t.extend(e.fv());
        }
        Names(t)
    }

    fn avoid(&mut self, x: &str) {
        self.0.insert(x.to_string());
    }

    fn fresh(&mut self, base: &str) -> Name {
        let n = fresh(base, &self.0);
        self.0.insert(n.clone());
        n
    }
}

/// Object-safe view of [`FreeVars`] for collecting names to avoid.
trait FreeVarsDyn {
    fn fv(&self) -> BTreeSet<Name>;
}

impl<T: FreeVars> FreeVarsDyn for T {
    fn fv(&self) -> BTreeSet<Name> {
        self.free_vars()
    }
}

impl<'d> Checker<'d> {
    // ---- values -----------------------------------------------------------

    pub fn infer_value(&mut self, ctx: &TypingContext, v: &ValueTerm) -> Result<ValueType, TypeError> {
        match v {
            ValueTerm::Var(x) => match ctx.lookup(x) {
                Some(t) => Ok(t.clone()),
                None => self.err(format!("unbound variable `{x}`")),
            },
            ValueTerm::Const(c) => {
                if let Some(d) = self.dom {
                    if !d.is_constant(c) {
                        return self.err(format!("`{c}` is neither bound nor a state of domain `{}`", d.name));
                    }
                }
                Ok(ValueType::State)
            }
            ValueTerm::Unit => Ok(ValueType::Unit),
            ValueTerm::Pair(a, b) => Ok(ValueType::prod(self.infer_value(ctx, a)?, self.infer_value(ctx, b)?)),
            ValueTerm::Inl(a, right) => {
                self.wf_type(ctx, right)?;
                Ok(ValueType::sum(self.infer_value(ctx, a)?, right.clone()))
            }
            ValueTerm::Inr(a, left) => {
                self.wf_type(ctx, left)?;
                Ok(ValueType::sum(left.clone(), self.infer_value(ctx, a)?))
            }
            ValueTerm::Lambda(x, t, body) => {
                self.wf_type(ctx, t)?;
                let y = self.bind_fresh(ctx, x, &BTreeSet::new());
                let c = self.infer_comp(&ctx.with(y.clone(), t.clone()), &body.rename(x, &y))?;
                Ok(ValueType::arrow(y, t.clone(), c))
            }
            ValueTerm::Reify(e) => {
                let c = self.infer_comp(ctx, e)?;
                let CompType::Mst { index, result, .. } = &c else {
                    return self.err("reify of a Pure computation");
                };
                if index.as_bool() != Some(true) {
                    return self.err(format!("reify requires index true, found {index}"));
                }
                let mut names = Names::of(ctx, &[&c]);
                let (s, x, s1, y) = (names.fresh("s"), names.fresh("x"), names.fresh("s'"), names.fresh("y"));
                let (pre, post) = open_mst(&c, &s, &x, &s1);
                let pair_t = ValueType::prod(result.clone(), ValueType::State);
                let body = Formula::conj(vec![
                    Formula::eq(pair_t.clone(), var(&y), ValueTerm::pair(var(&x), var(&s1))),
                    Formula::rel(var(&s), var(&s1)),
                    post,
                ]);
                let post = Formula::exists(x, result.clone(), Formula::exists(s1, ValueType::State, body));
                let pure = CompType::Pure { result: pair_t, pre, post_binder: y, post };
                Ok(ValueType::arrow(s, ValueType::State, pure))
            }
            ValueTerm::Prim(p, a) => {
                if let Some(d) = self.dom {
                    if d.primitive(p).is_none() {
                        return self.err(format!("unknown primitive `{p}` in domain `{}`", d.name));
                    }
                }
                let t = self.infer_value(ctx, a)?;
                if t != ValueType::State {
                    return self.err(format!("primitive `{p}` applied to `{a}` of type {t}, expected state"));
                }
                Ok(ValueType::State)
            }
        }
    }

    // ---- subtyping --------------------------------------------------------

    /// `Γ ⊢ t <: t'`: structural, with arrows contravariant in the domain.
    pub fn sub_value(&mut self, ctx: &TypingContext, t: &ValueType, t1: &ValueType) -> Result<(), TypeError> {
        if alpha_eq(t, t1) {
            return Ok(());
        }
        match (t, t1) {
            (ValueType::Prod(a, b), ValueType::Prod(a1, b1)) | (ValueType::Sum(a, b), ValueType::Sum(a1, b1)) => {
                self.sub_value(ctx, a, a1)?;
                self.sub_value(ctx, b, b1)
            }
            (ValueType::Arrow(x, a, c), ValueType::Arrow(x1, a1, c1)) => {
                self.sub_value(ctx, a1, a)?;
                let mut names = Names::of(ctx, &[t, t1]);
                let z = names.fresh(x);
                self.sub_comp(&ctx.with(z.clone(), (**a1).clone()), &c.rename(x, &z), &c1.rename(x1, &z))
            }
            _ => self.err(format!("type mismatch: expected {t1}, found {t}")),
        }
    }

    /// `Γ ⊢ C <: C'`, emitting the entailments as obligations.
    pub fn sub_comp(&mut self, ctx: &TypingContext, c: &CompType, c1: &CompType) -> Result<(), TypeError> {
        match (c, c1) {
            (CompType::Mst { index, result, .. }, CompType::Mst { index: index1, result: result1, .. }) => {
                if !alpha_eq(index, index1) {
                    return self.err(format!("effect index mismatch: expected {index1}, found {index}"));
                }
                self.sub_value(ctx, result, result1)?;
                let mut names = Names::of(ctx, &[c, c1]);
                let (s, x, s1) = (names.fresh("s"), names.fresh("x"), names.fresh("s'"));
                let (pre, post) = open_mst(c, &s, &x, &s1);
                let (pre1, post1) = open_mst(c1, &s, &x, &s1);
                let cs = ctx.with(s.clone(), ValueType::State);
                self.oblige(cs.clone(), vec![pre1.clone()], pre, "Sub-MST pre");
                let cpost = cs.with(x, result.clone()).with(s1.clone(), ValueType::State);
                let rel = Formula::rel(var(&s), var(&s1));
                self.oblige(cpost, vec![pre1, rel, post], post1, "Sub-MST post");
                Ok(())
            }
            (CompType::Pure { result, .. }, CompType::Pure { result: result1, .. }) => {
                self.sub_value(ctx, result, result1)?;
                let y = Names::of(ctx, &[c, c1]).fresh("y");
                let (pre, post) = open_pure(c, &y);
                let (pre1, post1) = open_pure(c1, &y);
                self.oblige(ctx.clone(), vec![pre1.clone()], pre, "Sub-Pure pre");
                self.oblige(ctx.with(y, result.clone()), vec![pre1, post], post1, "Sub-Pure post");
                Ok(())
            }
            (CompType::Pure { .. }, CompType::Mst { index, .. }) => self.sub_comp(ctx, &lift(ctx, c, index), c1),
            _ => self.err(format!("computation type mismatch: expected {c1}, found {c}")),
        }
    }
}

impl<'d> Checker<'d> {
    // ---- computations -----------------------------------------------------

    pub fn infer_comp(&mut self, ctx: &TypingContext, e: &CompTerm) -> Result<CompType, TypeError> {
        match e {
            CompTerm::Located(p, inner) => {
                let saved = self.pos.replace(*p);
                let r = self.infer_comp(ctx, inner);
                self.pos = saved;
                r
            }
            CompTerm::Return(b, v) => {
                self.check_index(ctx, b)?;
                let t = self.infer_value(ctx, v)?;
                let mut names = Names::of(ctx, &[v, b]);
                let (s, x, s1) = (names.fresh("s"), names.fresh("x"), names.fresh("s'"));
                let post = Formula::and(Formula::eq(ValueType::State, var(&s), var(&s1)), Formula::eq(t.clone(), var(&x), v.clone()));
                Ok(mst(b.clone(), t, &s, Formula::Top, (&s, &x, &s1), post))
            }
            CompTerm::PureReturn(v) => {
                let t = self.infer_value(ctx, v)?;
                let x = Names::of(ctx, &[v]).fresh("x");
                let post = Formula::eq(t.clone(), var(&x), v.clone());
                Ok(CompType::Pure { result: t, pre: Formula::Top, post_binder: x, post })
            }
            CompTerm::Get(b) => {
                self.check_index(ctx, b)?;
                let mut names = Names::of(ctx, &[b]);
                let (s, x, s1) = (names.fresh("s"), names.fresh("x"), names.fresh("s'"));
                let post = Formula::and(
                    Formula::eq(ValueType::State, var(&s), var(&x)),
                    Formula::eq(ValueType::State, var(&x), var(&s1)),
                );
                Ok(mst(b.clone(), ValueType::State, &s, Formula::Top, (&s, &x, &s1), post))
            }
            CompTerm::Put(b, sigma) => {
                self.check_index(ctx, b)?;
                let t = self.infer_value(ctx, sigma)?;
                if t != ValueType::State {
                    return self.err(format!("put of `{sigma}` of type {t}, expected state"));
                }
                let mut names = Names::of(ctx, &[b, sigma]);
                let (s, x, s1) = (names.fresh("s"), names.fresh("x"), names.fresh("s'"));
                let pre = Formula::rel(var(&s), sigma.clone());
                let post = Formula::eq(ValueType::State, var(&s1), sigma.clone());
                Ok(mst(b.clone(), ValueType::Unit, &s, pre, (&s, &x, &s1), post))
            }
            CompTerm::Witness(b, p) => {
                self.check_index(ctx, b)?;
                self.wf_predicate(ctx, p)?;
                let mut names = Names::of(ctx, &[b, p]);
                let (s, x, s1) = (names.fresh("s'"), names.fresh("x"), names.fresh("s''"));
                let pre = guarded(b, Formula::and(stable_formula(p), p.apply(&var(&s))));
                let post = and_all(vec![
                    Formula::eq(ValueType::State, var(&s), var(&s1)),
                    guarded(b, Formula::Witnessed(p.clone())),
                ]);
                Ok(mst(b.clone(), ValueType::Unit, &s, pre, (&s, &x, &s1), post))
            }
            CompTerm::Recall(b, p) => {
                self.check_index(ctx, b)?;
                self.wf_predicate(ctx, p)?;
                let mut names = Names::of(ctx, &[b, p]);
                let (s, x, s1) = (names.fresh("s'"), names.fresh("x"), names.fresh("s''"));
                let pre = guarded(b, Formula::Witnessed(p.clone()));
                let post = and_all(vec![Formula::eq(ValueType::State, var(&s), var(&s1)), guarded(b, p.apply(&var(&s1)))]);
                Ok(mst(b.clone(), ValueType::Unit, &s, pre, (&s, &x, &s1), post))
            }
            CompTerm::Bind(x, e1, e2) => self.infer_bind(ctx, x, e1, e2),
            CompTerm::App(f, a) => {
                let tf = self.infer_value(ctx, f)?;
                let ValueType::Arrow(y, dom, cod) = tf else {
                    return self.err(format!("application of `{f}` of non-function type {tf}"));
                };
                let ta = self.infer_value(ctx, a)?;
                self.sub_value(ctx, &ta, &dom)?;
                Ok(cod.subst(&y, a))
            }
            CompTerm::PMatch(v, x1, x2, body) => self.infer_pmatch(ctx, v, x1, x2, body),
            CompTerm::Case(v, xl, el, xr, er) => self.infer_case(ctx, v, (xl, el), (xr, er)),
            CompTerm::Reflect(v) => self.infer_reflect(ctx, v),
            CompTerm::Coerce(inner) => match self.infer_comp(ctx, inner)? {
                CompType::Mst { index, result, pre_binder, pre, post_binders, post } => {
                    if index.as_bool() != Some(true) {
                        return self.err(format!("coerce requires index true, found {index}"));
                    }
                    Ok(CompType::Mst { index: ValueTerm::ff(), result, pre_binder, pre, post_binders, post })
                }
                CompType::Pure { .. } => self.err("coerce of a Pure computation"),
            },
        }
    }

    fn wf_predicate(&self, ctx: &TypingContext, p: &Predicate) -> Result<(), TypeError> {
        self.wf_formula(ctx, &Formula::Witnessed(p.clone()))
    }

    fn infer_bind(&mut self, ctx: &TypingContext, x: &str, e1: &CompTerm, e2: &CompTerm) -> Result<CompType, TypeError> {
        let mut c1 = self.infer_comp(ctx, e1)?;
        let x1 = self.bind_fresh(ctx, x, &BTreeSet::new());
        let e2 = e2.rename(x, &x1);
        let ctx2 = ctx.with(x1.clone(), c1.result().clone());
        let mut c2 = self.infer_comp(&ctx2, &e2)?;
        // Pure computations are lifted into the effect of the other side.
        match (&c1, &c2) {
            (CompType::Pure { .. }, CompType::Mst { index, .. }) if !index.has_free(&x1) => c1 = lift(ctx, &c1, index),
            (CompType::Mst { index, .. }, CompType::Pure { .. }) => c2 = lift(&ctx2, &c2, index),
            _ => {}
        }
        if c2.result().has_free(&x1) {
            return self.err(format!("result type {} mentions the bound variable `{x1}`", c2.result()));
        }
        let mut names = Names::of(&ctx2, &[&c1, &c2]);
        match (&c1, &c2) {
            (CompType::Mst { index: b1, result: t1, .. }, CompType::Mst { index: b2, result: t2, .. }) => {
                if !alpha_eq(b1, b2) || b2.has_free(&x1) {
                    return self.err(format!("bind composes computations with indices {b1} and {b2}"));
                }
                let (s, m, y, s2) = (names.fresh("s"), names.fresh("s'"), names.fresh("y"), names.fresh("s''"));
                let (pre1, post1) = open_mst(&c1, &s, &x1, &m);
                let (pre2, post2) = open_mst(&c2, &m, &y, &s2);
                let mid = Formula::exists(s.clone(), ValueType::State, post1.clone());
                self.oblige(ctx2.with(m.clone(), ValueType::State), vec![mid], pre2, "T-Bind");
                let post = Formula::exists(
                    x1.clone(),
                    t1.clone(),
                    Formula::exists(m.clone(), ValueType::State, Formula::and(post1, post2)),
                );
                Ok(mst(b1.clone(), t2.clone(), &s, pre1, (&s, &y, &s2), post))
            }
            (CompType::Pure { result: t1, .. }, CompType::Pure { result: t2, .. }) => {
                let y = names.fresh("y");
                let (pre1, post1) = open_pure(&c1, &x1);
                let (pre2, post2) = open_pure(&c2, &y);
                self.oblige(ctx2, vec![pre1.clone(), post1.clone()], pre2, "Bind-Pure");
                let post = Formula::exists(x1.clone(), t1.clone(), Formula::and(post1, post2));
                Ok(CompType::Pure { result: t2.clone(), pre: pre1, post_binder: y, post })
            }
            _ => self.err(format!("bind mixes effects: {c1} then {c2}")),
        }
    }
}

/// Binder names shared by the branches of a pattern match or case split.
struct Binders {
    s: Name,
    x: Name,
    s1: Name,
    y: Name,
}

impl Binders {
    fn new(names: &mut Names) -> Self {
        Binders { s: names.fresh("s"), x: names.fresh("x"), s1: names.fresh("s'"), y: names.fresh("y") }
    }

    fn open(&self, c: &CompType) -> (Formula, Formula) {
        match c {
            CompType::Mst { .. } => open_mst(c, &self.s, &self.x, &self.s1),
            CompType::Pure { .. } => open_pure(c, &self.y),
        }
    }

    /// `like` with its conditions replaced by `pre`/`post` over these binders.
    fn rebuild(&self, like: &CompType, pre: Formula, post: Formula) -> CompType {
        match like {
            CompType::Mst { index, result, .. } => {
                mst(index.clone(), result.clone(), &self.s, pre, (&self.s, &self.x, &self.s1), post)
            }
            CompType::Pure { result, .. } => CompType::Pure { result: result.clone(), pre, post_binder: self.y.clone(), post },
        }
    }
}

fn same_shape(a: &CompType, b: &CompType) -> bool {
    match (a, b) {
        (CompType::Mst { index: i, result: r, .. }, CompType::Mst { index: j, result: q, .. }) => alpha_eq(i, j) && alpha_eq(r, q),
        (CompType::Pure { result: r, .. }, CompType::Pure { result: q, .. }) => alpha_eq(r, q),
        _ => false,
    }
}

fn foralls(vars: &[(Name, ValueType)], f: Formula) -> Formula {
    vars.iter().rev().fold(f, |acc, (x, t)| Formula::forall(x.clone(), t.clone(), acc))
}

fn exists_all(vars: &[(Name, ValueType)], f: Formula) -> Formula {
    vars.iter().rev().fold(f, |acc, (x, t)| Formula::exists(x.clone(), t.clone(), acc))
}

impl<'d> Checker<'d> {
    fn infer_pmatch(&mut self, ctx: &TypingContext, v: &ValueTerm, x1: &str, x2: &str, body: &CompTerm) -> Result<CompType, TypeError> {
        let tv = self.infer_value(ctx, v)?;
        let ValueType::Prod(t1, t2) = &tv else {
            return self.err(format!("pattern match on `{v}` of non-product type {tv}"));
        };
        let a = self.bind_fresh(ctx, x1, &BTreeSet::new());
        let b = self.bind_fresh(&ctx.with(a.clone(), (**t1).clone()), x2, &BTreeSet::new());
        let body = body.subst_many(&Subst::single(x1, var(&a)).with(x2, var(&b)));
        let inner = ctx.with(a.clone(), (**t1).clone()).with(b.clone(), (**t2).clone());
        let c = self.infer_comp(&inner, &body)?;
        if c.result().has_free(&a) || c.result().has_free(&b) || c.index().is_some_and(|i| i.has_free(&a) || i.has_free(&b)) {
            return self.err("pattern-bound variables escape into the result type");
        }
        if let ValueTerm::Pair(va, vb) = v {
            return Ok(c.subst_many(&Subst::single(a, (**va).clone()).with(b, (**vb).clone())));
        }
        let mut names = Names::of(&inner, &[&c, v]);
        let bs = Binders::new(&mut names);
        let (pre, post) = bs.open(&c);
        let guard = Formula::eq(tv.clone(), v.clone(), ValueTerm::pair(var(&a), var(&b)));
        let vars = [(a, (**t1).clone()), (b, (**t2).clone())];
        let pre = foralls(&vars, Formula::implies(guard.clone(), pre));
        let post = exists_all(&vars, Formula::and(guard, post));
        Ok(bs.rebuild(&c, pre, post))
    }

    fn infer_case(
        &mut self,
        ctx: &TypingContext,
        v: &ValueTerm,
        (xl, el): (&Name, &CompTerm),
        (xr, er): (&Name, &CompTerm),
    ) -> Result<CompType, TypeError> {
        let tv = self.infer_value(ctx, v)?;
        let ValueType::Sum(tl, tr) = &tv else {
            return self.err(format!("case on `{v}` of non-sum type {tv}"));
        };
        let branch = |this: &mut Self, x: &Name, e: &CompTerm, t: &ValueType| -> Result<(Name, CompType), TypeError> {
            let y = this.bind_fresh(ctx, x, &BTreeSet::new());
            let c = this.infer_comp(&ctx.with(y.clone(), t.clone()), &e.rename(x, &y))?;
            if c.result().has_free(&y) || c.index().is_some_and(|i| i.has_free(&y)) {
                return this.err(format!("case-bound `{x}` escapes into the result type"));
            }
            Ok((y, c))
        };
        // A literal scrutinee selects its branch.
        match v {
            ValueTerm::Inl(a, _) => {
                let (y, c) = branch(self, xl, el, tl)?;
                return Ok(c.subst(&y, a));
            }
            ValueTerm::Inr(a, _) => {
                let (y, c) = branch(self, xr, er, tr)?;
                return Ok(c.subst(&y, a));
            }
            _ => {}
        }
        let (yl, cl) = branch(self, xl, el, tl)?;
        let (yr, cr) = branch(self, xr, er, tr)?;
        if !same_shape(&cl, &cr) {
            return self.err(format!("case branches have different types: {cl} and {cr}"));
        }
        let mut names = Names::of(ctx, &[&cl, &cr, v]);
        names.avoid(&yl);
        names.avoid(&yr);
        let bs = Binders::new(&mut names);
        let side = |y: &Name, c: &CompType, t: &ValueType, inj: fn(ValueTerm, ValueType) -> ValueTerm, other: &ValueType| {
            let (pre, post) = bs.open(c);
            if *t == ValueType::Unit {
                // Unit payloads need no quantifier.
                let g = Formula::eq(tv.clone(), v.clone(), inj(ValueTerm::Unit, other.clone()));
                let (pre, post) = (pre.subst(y, &ValueTerm::Unit), post.subst(y, &ValueTerm::Unit));
                return (Formula::implies(g.clone(), pre), Formula::and(g, post));
            }
            let g = Formula::eq(tv.clone(), v.clone(), inj(var(y), other.clone()));
            let vars = [(y.clone(), t.clone())];
            (foralls(&vars, Formula::implies(g.clone(), pre)), exists_all(&vars, Formula::and(g, post)))
        };
        let (pl, ql) = side(&yl, &cl, tl, ValueTerm::inl, tr);
        let (pr, qr) = side(&yr, &cr, tr, ValueTerm::inr, tl);
        Ok(bs.rebuild(&cl, Formula::and(pl, pr), Formula::or(ql, qr)))
    }

    fn infer_reflect(&mut self, ctx: &TypingContext, v: &ValueTerm) -> Result<CompType, TypeError> {
        let tv = self.infer_value(ctx, v)?;
        let shape_err = |tv: &ValueType| format!("reflect expects a state-passing function (s:state) -> Pure (t * state) ..., found {tv}");
        let ValueType::Arrow(s0, dom, cod) = &tv else { return self.err(shape_err(&tv)) };
        let CompType::Pure { result: ValueType::Prod(t, st), .. } = &**cod else { return self.err(shape_err(&tv)) };
        if **dom != ValueType::State || **st != ValueType::State {
            return self.err(shape_err(&tv));
        }
        let mut names = Names::of(ctx, &[&tv]);
        let (s, x, s1, y) = (names.fresh("s"), names.fresh("x"), names.fresh("s'"), names.fresh("y"));
        let cod = cod.rename(s0, &s);
        let (pre, post) = open_pure(&cod, &y);
        if let Some(p) = reflect_shape(&post, &y, &s, t, &x, &s1) {
            return Ok(mst(ValueTerm::tt(), (**t).clone(), &s, pre, (&s, &x, &s1), p));
        }
        // Otherwise the postcondition must itself guarantee preorder compliance.
        let q = post.subst(&y, &ValueTerm::pair(var(&x), var(&s1)));
        let c = ctx.with(s.clone(), ValueType::State).with(x.clone(), (**t).clone()).with(s1.clone(), ValueType::State);
        self.oblige(c, vec![pre.clone(), q.clone()], Formula::rel(var(&s), var(&s1)), "T-Reflect");
        Ok(mst(ValueTerm::tt(), (**t).clone(), &s, pre, (&s, &x, &s1), q))
    }
}

/// Matches `∃x:t. ∃s':state. y == (x, s') ∧ rel s s' ∧ P` and returns `P`
/// over the binder names `x`, `s1`.
fn reflect_shape(post: &Formula, y: &str, s: &str, t: &ValueType, x: &str, s1: &str) -> Option<Formula> {
    let Formula::Exists(bx, tx, inner) = post else { return None };
    let Formula::Exists(bs, ts, body) = &**inner else { return None };
    if !alpha_eq(tx, t) || *ts != ValueType::State || bx == bs {
        return None;
    }
    let body = body.subst_many(&Subst::single(bx.clone(), var(x)).with(bs.clone(), var(s1)));
    let Formula::And(eq, rest) = &body else { return None };
    let Formula::And(rel, p) = &**rest else { return None };
    let pair_t = ValueType::prod(t.clone(), ValueType::State);
    let want_eq = Formula::eq(pair_t, var(y), ValueTerm::pair(var(x), var(s1)));
    if !alpha_eq(&**eq, &want_eq) || !alpha_eq(&**rel, &Formula::rel(var(s), var(s1))) || p.has_free(y) {
        return None;
    }
    Some((**p).clone())
}
