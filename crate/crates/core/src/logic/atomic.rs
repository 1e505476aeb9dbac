//! Saturation over atomic left formulas with the equality and preorder
//! rules. Closes a sequent when a right atom (or `⊥` via disjoint
//! injections) becomes derivable, and rebuilds the explicit chain of
//! left-rule applications as a proof.

use crate::ast::*;

use super::proof::{Proof, Rule};
use super::sequent::Sequent;
use super::terms::{ground_subterms, term_has_type};

const FACT_LIMIT: usize = 2500;

#[derive(Clone, Debug)]
enum Just {
    Given,
    EqRefl(ValueTerm, ValueType),
    RelRefl(ValueTerm),
    RelTrans(usize, usize),
    Transport { eq: usize, from: usize },
    /// `b == a` from `a == b`: Eq-Refl on `a` then transport.
    Sym(usize),
    PairInj(usize, usize),
    /// Instance of a universally quantified atom on the left.
    Inst(Formula, Vec<ValueTerm>),
}

struct Fact {
    f: Formula,
    just: Just,
}

enum Goal {
    Ax(usize),
    SumDisjoint(usize),
}

struct Engine<'a> {
    seq: &'a Sequent,
    universe: Vec<ValueTerm>,
    facts: Vec<Fact>,
}

fn eq_parts(f: &Formula) -> Option<(&ValueType, &ValueTerm, &ValueTerm)> {
    match f {
        Formula::Atom(AtomHead::Eq(t), args) if args.len() == 2 => Some((t, &args[0], &args[1])),
        _ => None,
    }
}

fn rel_parts(f: &Formula) -> Option<(&ValueTerm, &ValueTerm)> {
    match f {
        Formula::Atom(AtomHead::Rel, args) if args.len() == 2 => Some((&args[0], &args[1])),
        _ => None,
    }
}

/// Every term obtained from `v` by replacing exactly one occurrence of `a`
/// with `b`.
fn one_replacements(v: &ValueTerm, a: &ValueTerm, b: &ValueTerm) -> Vec<ValueTerm> {
    let mut out = Vec::new();
    if alpha_eq(v, a) {
        out.push(b.clone());
    }
    match v {
        ValueTerm::Pair(x, y) => {
            for x2 in one_replacements(x, a, b) {
                out.push(ValueTerm::pair(x2, (**y).clone()));
            }
            for y2 in one_replacements(y, a, b) {
                out.push(ValueTerm::pair((**x).clone(), y2));
            }
        }
        ValueTerm::Inl(x, t) => out.extend(one_replacements(x, a, b).into_iter().map(|x2| ValueTerm::inl(x2, t.clone()))),
        ValueTerm::Inr(x, t) => out.extend(one_replacements(x, a, b).into_iter().map(|x2| ValueTerm::inr(x2, t.clone()))),
        ValueTerm::Prim(p, x) => out.extend(one_replacements(x, a, b).into_iter().map(|x2| ValueTerm::prim(p.clone(), x2))),
        _ => {}
    }
    out
}

fn atom_replacements(f: &Formula, a: &ValueTerm, b: &ValueTerm) -> Vec<Formula> {
    let Formula::Atom(h, args) = f else { return Vec::new() };
    let mut out = Vec::new();
    for (i, arg) in args.iter().enumerate() {
        for r in one_replacements(arg, a, b) {
            let mut args2 = args.clone();
            args2[i] = r;
            out.push(Formula::Atom(h.clone(), args2));
        }
    }
    out
}

impl<'a> Engine<'a> {
    fn new(seq: &'a Sequent) -> Self {
        let atoms = seq.left.iter().chain(seq.right.iter()).filter(|f| f.is_atomic());
        let universe = ground_subterms(atoms);
        let mut e = Engine { seq, universe, facts: Vec::new() };
        for f in seq.left.iter().filter(|f| f.is_atomic()) {
            e.facts.push(Fact { f: f.clone(), just: Just::Given });
        }
        for f in seq.left.iter() {
            e.instantiate(f);
        }
        e
    }

    /// Adds the instances of `∀x̄. A` (A atomic, at most two binders) whose
    /// terms all lie in the universe.
    fn instantiate(&mut self, f: &Formula) {
        let mut vars = Vec::new();
        let mut body = f;
        while let Formula::Forall(x, t, b) = body {
            vars.push((x.clone(), t.clone()));
            body = b;
        }
        if vars.is_empty() || vars.len() > 2 || !body.is_atomic() {
            return;
        }
        let ctx = &self.seq.ctx;
        let pools: Vec<Vec<ValueTerm>> = vars
            .iter()
            .map(|(_, t)| self.universe.iter().filter(|u| term_has_type(ctx, u, t)).cloned().collect())
            .collect();
        let mut combos: Vec<Vec<ValueTerm>> = vec![vec![]];
        for pool in &pools {
            combos = combos
                .into_iter()
                .flat_map(|c| pool.iter().map(move |u| c.iter().cloned().chain([u.clone()]).collect()))
                .collect();
        }
        for terms in combos {
            let mut sub = Subst::new();
            for ((x, _), v) in vars.iter().zip(&terms) {
                sub.insert(x.clone(), v.clone());
            }
            let inst = body.subst_many(&sub);
            if self.in_universe(&inst) {
                self.add(inst, Just::Inst(f.clone(), terms));
            }
        }
    }

    fn in_universe(&self, f: &Formula) -> bool {
        match f {
            Formula::Atom(_, args) => args.iter().all(|a| self.universe.iter().any(|u| alpha_eq(u, a))),
            _ => false,
        }
    }

    fn known(&self, f: &Formula) -> Option<usize> {
        self.facts.iter().position(|g| alpha_eq(&g.f, f))
    }

    fn add(&mut self, f: Formula, just: Just) -> bool {
        if self.facts.len() >= FACT_LIMIT || self.known(&f).is_some() {
            return false;
        }
        self.facts.push(Fact { f, just });
        true
    }

    fn goal(&self, i: usize) -> Option<Goal> {
        let f = &self.facts[i].f;
        if self.seq.right.contains(f) {
            return Some(Goal::Ax(i));
        }
        if let Some((_, ValueTerm::Inl(..), ValueTerm::Inr(..))) = eq_parts(f) {
            return Some(Goal::SumDisjoint(i));
        }
        None
    }

    fn seed_reflexive(&mut self) {
        let ctx = &self.seq.ctx;
        let mut seeds = Vec::new();
        for f in self.seq.right.iter() {
            if let Some((a, b)) = rel_parts(f) {
                for v in [a, b] {
                    if term_has_type(ctx, v, &ValueType::State) {
                        seeds.push((Formula::rel(v.clone(), v.clone()), Just::RelRefl(v.clone())));
                    }
                }
            } else if let Some((t, a, b)) = eq_parts(f) {
                for v in [a, b] {
                    if term_has_type(ctx, v, t) {
                        seeds.push((Formula::eq(t.clone(), v.clone(), v.clone()), Just::EqRefl(v.clone(), t.clone())));
                    }
                }
            }
        }
        for (f, j) in seeds {
            self.add(f, j);
        }
    }

    /// Consequences of fact `i` combined with facts `0..=i`.
    fn consequences(&self, i: usize) -> Vec<(Formula, Just)> {
        let mut out = Vec::new();
        let fi = &self.facts[i].f;
        let ctx = &self.seq.ctx;
        if let Some((t, a, b)) = eq_parts(fi) {
            if !alpha_eq(a, b) && term_has_type(ctx, a, t) {
                out.push((Formula::eq(t.clone(), b.clone(), a.clone()), Just::Sym(i)));
            }
            if let (ValueType::Prod(t1, t2), ValueTerm::Pair(a1, a2), ValueTerm::Pair(b1, b2)) = (t, a, b) {
                out.push((Formula::eq((**t1).clone(), (**a1).clone(), (**b1).clone()), Just::PairInj(i, 0)));
                out.push((Formula::eq((**t2).clone(), (**a2).clone(), (**b2).clone()), Just::PairInj(i, 1)));
            }
            if !alpha_eq(a, b) {
                for j in 0..=i {
                    for g in atom_replacements(&self.facts[j].f, a, b) {
                        if self.in_universe(&g) {
                            out.push((g, Just::Transport { eq: i, from: j }));
                        }
                    }
                }
            }
        }
        for j in 0..i {
            if let Some((_, a, b)) = eq_parts(&self.facts[j].f) {
                if !alpha_eq(a, b) {
                    for g in atom_replacements(fi, a, b) {
                        if self.in_universe(&g) {
                            out.push((g, Just::Transport { eq: j, from: i }));
                        }
                    }
                }
            }
        }
        if let Some((a, b)) = rel_parts(fi) {
            for j in 0..=i {
                if let Some((c, d)) = rel_parts(&self.facts[j].f) {
                    if alpha_eq(b, c) {
                        out.push((Formula::rel(a.clone(), d.clone()), Just::RelTrans(i, j)));
                    }
                    if alpha_eq(d, a) {
                        out.push((Formula::rel(c.clone(), b.clone()), Just::RelTrans(j, i)));
                    }
                }
            }
        }
        out
    }

    fn saturate(&mut self) -> Option<Goal> {
        self.seed_reflexive();
        let mut i = 0;
        while i < self.facts.len() {
            if let Some(g) = self.goal(i) {
                return Some(g);
            }
            for (f, j) in self.consequences(i) {
                self.add(f, j);
            }
            i += 1;
        }
        None
    }

    fn deps(&self, i: usize, need: &mut Vec<bool>) {
        if need[i] {
            return;
        }
        need[i] = true;
        match self.facts[i].just {
            Just::RelTrans(a, b) | Just::Transport { eq: a, from: b } => {
                self.deps(a, need);
                self.deps(b, need);
            }
            Just::Sym(a) | Just::PairInj(a, _) => self.deps(a, need),
            _ => {}
        }
    }

    fn rules_for(&self, i: usize) -> Vec<(Rule, Formula)> {
        let f = self.facts[i].f.clone();
        let fact = |k: usize| self.facts[k].f.clone();
        match &self.facts[i].just {
            Just::Given => vec![],
            Just::EqRefl(v, t) => vec![(Rule::EqRefl(v.clone(), t.clone()), f)],
            Just::RelRefl(v) => vec![(Rule::RelRefl(v.clone()), f)],
            Just::RelTrans(a, b) => vec![(Rule::RelTrans(fact(*a), fact(*b)), f)],
            Just::Transport { eq, from } => {
                vec![(Rule::EqTransport { eq: fact(*eq), from: fact(*from), to: f.clone() }, f)]
            }
            Just::PairInj(k, c) => vec![(Rule::PairInjective(fact(*k), *c), f)],
            Just::Inst(all, terms) => {
                let mut out = Vec::new();
                let mut cur = all.clone();
                for v in terms {
                    let Formula::Forall(x, _, b) = &cur else { unreachable!("instantiation depth matches binders") };
                    let next = b.subst(x, v);
                    out.push((Rule::ForallL(cur.clone(), v.clone()), next.clone()));
                    cur = next;
                }
                out
            }
            Just::Sym(k) => {
                let eq = fact(*k);
                let (t, a, _) = eq_parts(&eq).expect("symmetry of an equation");
                let refl = Formula::eq(t.clone(), a.clone(), a.clone());
                vec![
                    (Rule::EqRefl(a.clone(), t.clone()), refl.clone()),
                    (Rule::EqTransport { eq: eq.clone(), from: refl, to: f.clone() }, f),
                ]
            }
        }
    }

    fn build(&self, goal: Goal) -> Proof {
        let root = match goal {
            Goal::Ax(i) | Goal::SumDisjoint(i) => i,
        };
        let mut need = vec![false; self.facts.len()];
        self.deps(root, &mut need);
        let mut steps = Vec::new();
        for (i, n) in need.iter().enumerate() {
            if *n {
                steps.extend(self.rules_for(i));
            }
        }
        let mut seqs = vec![self.seq.clone()];
        for (_, f) in &steps {
            let last = seqs.last().unwrap();
            seqs.push(Sequent::new(last.ctx.clone(), last.left.with(f.clone()), last.right.clone()));
        }
        let closing = match goal {
            Goal::Ax(i) => Rule::Ax(self.facts[i].f.clone()),
            Goal::SumDisjoint(i) => Rule::SumDisjoint(self.facts[i].f.clone()),
        };
        let mut proof = Proof::new(closing, seqs.pop().unwrap(), vec![]);
        for (rule, _) in steps.into_iter().rev() {
            proof = Proof::new(rule, seqs.pop().unwrap(), vec![proof]);
        }
        proof
    }
}

/// Whether saturation could possibly close `seq`.
fn worth_trying(seq: &Sequent) -> bool {
    seq.right.iter().any(Formula::is_atomic)
        || seq.left.iter().any(|f| {
            matches!(eq_parts(f), Some((t, _, _)) if matches!(t, ValueType::Sum(..) | ValueType::Prod(..)))
        })
}

/// Closes `seq` using only the atomic rules, if possible.
pub fn close_atomic(seq: &Sequent) -> Option<Proof> {
    if !worth_trying(seq) {
        return None;
    }
    let mut e = Engine::new(seq);
    let goal = e.saturate()?;
    Some(e.build(goal))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::check_proof;
    use crate::parser::parse_sequent;

    fn closes(src: &str) -> bool {
        let seq = parse_sequent(src).unwrap();
        match close_atomic(&seq) {
            Some(p) => {
                check_proof(&p).unwrap();
                assert_eq!(p.conclusion, seq);
                true
            }
            None => false,
        }
    }

    #[test]
    fn reflexivity() {
        assert!(closes("|- rel c0 c0"));
        assert!(closes("x:unit | |- x ==[unit] x"));
    }

    #[test]
    fn transitivity_chain() {
        assert!(closes("rel c0 c1, rel c1 c2, rel c2 c3 |- rel c0 c3"));
        assert!(!closes("rel c0 c1, rel c2 c3 |- rel c0 c3"));
    }

    #[test]
    fn transport_and_symmetry() {
        assert!(closes("x:state | x == c0 |- rel c0 x"));
        assert!(closes("x:state, y:state | x == y, rel c0 x |- rel c0 y"));
        assert!(closes("x:state, y:state | x == y |- y == x"));
    }

    #[test]
    fn atomic_axiom_instances() {
        assert!(closes("forall s:state. rel s (succ s) |- rel c0 (succ (succ c0))"));
        assert!(!closes("forall s:state. rel s (succ s) |- rel c0 c1"));
    }

    #[test]
    fn pairs_and_sums() {
        assert!(closes("x:state, y:state | (x, c1) ==[state * state] (c0, y) |- x == c0"));
        assert!(closes("false ==[bool] true |- "));
        assert!(!closes("c0 == c1 |- "));
    }
}
