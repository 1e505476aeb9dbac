use super::{Primitive, StateDomain};

pub const DEFAULT_COUNTER_MAX: usize = 32;

fn index(name: &str) -> usize {
    name.strip_prefix('c').and_then(|n| n.parse().ok()).expect("counter state")
}

/// Naturals `0..=max` as constants `c0..c{max}` ordered by `<=`. `succ`
/// saturates at `c{max}`; the sample is a prefix of the naturals, so it is
/// not exhaustive.
pub(super) fn counter(max: usize) -> StateDomain {
    let names: Vec<String> = (0..=max).map(|i| format!("c{i}")).collect();
    let succ = Primitive::new("succ", move |s| format!("c{}", (index(s) + 1).min(max))).inflationary();
    StateDomain::new("counter", names.clone(), |a, b| index(a) <= index(b), names, false, vec![succ])
}
