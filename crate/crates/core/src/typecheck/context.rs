use std::collections::BTreeSet;

use crate::ast::{FreeVars, Name, ValueType};

/// Ordered variable typings `x1:t1, ..., xn:tn`. Later entries shadow
/// earlier ones on lookup.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TypingContext {
    entries: Vec<(Name, ValueType)>,
}

impl TypingContext {
    pub fn new() -> Self {
        TypingContext::default()
    }

    pub fn push(&mut self, x: impl Into<Name>, t: ValueType) {
        self.entries.push((x.into(), t));
    }

    pub fn with(&self, x: impl Into<Name>, t: ValueType) -> Self {
        let mut c = self.clone();
        c.push(x, t);
        c
    }

    pub fn contains(&self, x: &str) -> bool {
        self.entries.iter().any(|(y, _)| y == x)
    }

    pub fn lookup(&self, x: &str) -> Option<&ValueType> {
        self.entries.iter().rev().find(|(y, _)| y == x).map(|(_, t)| t)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &ValueType)> {
        self.entries.iter().map(|(x, t)| (x, t))
    }

    pub fn names(&self) -> BTreeSet<Name> {
        self.entries.iter().map(|(x, _)| x.clone()).collect()
    }

    /// Names bound here or free in any entry's type.
    pub fn all_names(&self) -> BTreeSet<Name> {
        let mut out = self.names();
        for (_, t) in &self.entries {
            out.extend(t.free_vars());
        }
        out
    }

    /// Same entries with `from` renamed to `to` (binder and type occurrences).
    pub fn rename(&self, from: &str, to: &str) -> Self {
        use crate::ast::Substitute;
        TypingContext {
            entries: self
                .entries
                .iter()
                .map(|(x, t)| {
                    let x = if x == from { to.to_string() } else { x.clone() };
                    (x, t.rename(from, to))
                })
                .collect(),
        }
    }
}

impl std::fmt::Display for TypingContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, (x, t)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}:{t}")?;
        }
        Ok(())
    }
}
