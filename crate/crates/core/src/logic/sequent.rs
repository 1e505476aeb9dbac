use std::collections::BTreeSet;
use std::fmt;

use crate::ast::*;
use crate::typecheck::TypingContext;

/// Finite set of formulas, deduplicated up to alpha-equivalence. Insertion
/// order is kept so that search and printing are deterministic.
#[derive(Clone, Debug, Default)]
pub struct FormulaSet {
    items: Vec<Formula>,
}

impl FormulaSet {
    pub fn new() -> Self {
        FormulaSet::default()
    }

    pub fn from_vec(fs: Vec<Formula>) -> Self {
        let mut s = FormulaSet::new();
        for f in fs {
            s.insert(f);
        }
        s
    }

    /// Returns false when an alpha-equivalent formula was already present.
    pub fn insert(&mut self, f: Formula) -> bool {
        if self.contains(&f) {
            false
        } else {
            self.items.push(f);
            true
        }
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.items.iter().any(|g| alpha_eq(g, f))
    }

    pub fn without(&self, f: &Formula) -> FormulaSet {
        FormulaSet { items: self.items.iter().filter(|g| !alpha_eq(*g, f)).cloned().collect() }
    }

    pub fn with(&self, f: Formula) -> FormulaSet {
        let mut s = self.clone();
        s.insert(f);
        s
    }

    pub fn with_all(&self, fs: impl IntoIterator<Item = Formula>) -> FormulaSet {
        let mut s = self.clone();
        for f in fs {
            s.insert(f);
        }
        s
    }

    pub fn union(&self, other: &FormulaSet) -> FormulaSet {
        self.with_all(other.items.iter().cloned())
    }

    pub fn is_subset(&self, other: &FormulaSet) -> bool {
        self.items.iter().all(|f| other.contains(f))
    }

    pub fn set_eq(&self, other: &FormulaSet) -> bool {
        self.len() == other.len() && self.is_subset(other)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Formula> {
        self.items.iter()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn to_vec(&self) -> Vec<Formula> {
        self.items.clone()
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for f in &self.items {
            out.extend(f.free_vars());
        }
        out
    }

    pub fn map(&self, f: impl Fn(&Formula) -> Formula) -> FormulaSet {
        FormulaSet::from_vec(self.items.iter().map(f).collect())
    }
}

impl PartialEq for FormulaSet {
    fn eq(&self, other: &Self) -> bool {
        self.set_eq(other)
    }
}

impl FromIterator<Formula> for FormulaSet {
    fn from_iter<I: IntoIterator<Item = Formula>>(iter: I) -> Self {
        FormulaSet::from_vec(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a FormulaSet {
    type Item = &'a Formula;
    type IntoIter = std::slice::Iter<'a, Formula>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

/// `Γ | Φ ⊢ Φ'`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Sequent {
    pub ctx: TypingContext,
    pub left: FormulaSet,
    pub right: FormulaSet,
}

impl Sequent {
    pub fn new(ctx: TypingContext, left: FormulaSet, right: FormulaSet) -> Self {
        Sequent { ctx, left, right }
    }

    pub fn from_formulas(ctx: TypingContext, left: Vec<Formula>, right: Vec<Formula>) -> Self {
        Sequent::new(ctx, FormulaSet::from_vec(left), FormulaSet::from_vec(right))
    }

    /// Free variables of the formulas, excluding nothing.
    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = self.left.free_vars();
        out.extend(self.right.free_vars());
        out
    }

    /// Every name a fresh variable must avoid.
    pub fn taken_names(&self) -> BTreeSet<Name> {
        let mut out = self.free_vars();
        out.extend(self.ctx.all_names());
        out
    }

    pub fn fresh(&self, base: &str) -> Name {
        let taken = self.taken_names();
        fresh_name(base, |c| taken.contains(c))
    }

    /// Same sequent with free variable `from` renamed to `to` everywhere.
    pub fn rename(&self, from: &str, to: &str) -> Sequent {
        Sequent {
            ctx: self.ctx.rename(from, to),
            left: self.left.map(|f| f.rename(from, to)),
            right: self.right.map(|f| f.rename(from, to)),
        }
    }
}

fn list(f: &mut fmt::Formatter<'_>, set: &FormulaSet) -> fmt::Result {
    for (i, phi) in set.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{phi}")?;
    }
    Ok(())
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.ctx.is_empty() {
            write!(f, "{} | ", self.ctx)?;
        }
        list(f, &self.left)?;
        if self.left.is_empty() {
            f.write_str("|- ")?;
        } else {
            f.write_str(" |- ")?;
        }
        list(f, &self.right)
    }
}
