use super::{Primitive, StateDomain};

pub const DEFAULT_ESCAPE_MAX: usize = 4;

#[derive(Clone, Copy)]
enum Escape {
    Ok(usize),
    /// `Tmp(snapshot, actual)`.
    Tmp(usize, usize),
}

fn parse(name: &str) -> Escape {
    if let Some(n) = name.strip_prefix("ok") {
        Escape::Ok(n.parse().expect("escape state"))
    } else {
        let rest = name.strip_prefix("tmp").expect("escape state");
        let (a, b) = rest.split_once('_').expect("escape state");
        Escape::Tmp(a.parse().expect("escape state"), b.parse().expect("escape state"))
    }
}

fn render(e: Escape) -> String {
    match e {
        Escape::Ok(n) => format!("ok{n}"),
        Escape::Tmp(s, a) => format!("tmp{s}_{a}"),
    }
}

fn snapshot(e: Escape) -> usize {
    match e {
        Escape::Ok(s) | Escape::Tmp(s, _) => s,
    }
}

/// A base counter `0..=max` lifted so that the preorder can be suspended:
/// `Tmp(snapshot, actual)` lets `actual` move freely while the preorder only
/// compares snapshots. `brk` enters the suspended mode, `bump`/`drop` move the
/// actual value, and `restore` returns to `Ok` when the actual value has not
/// fallen below the snapshot.
pub(super) fn escape(max: usize) -> StateDomain {
    let mut names: Vec<String> = (0..=max).map(|n| render(Escape::Ok(n))).collect();
    for s in 0..=max {
        for a in 0..=max {
            names.push(render(Escape::Tmp(s, a)));
        }
    }
    let prims = vec![
        Primitive::new("brk", |t| match parse(t) {
            Escape::Ok(s) => render(Escape::Tmp(s, s)),
            tmp => render(tmp),
        }),
        Primitive::new("bump", move |t| match parse(t) {
            Escape::Tmp(s, a) => render(Escape::Tmp(s, (a + 1).min(max))),
            ok => render(ok),
        }),
        Primitive::new("drop", |t| match parse(t) {
            Escape::Tmp(s, a) => render(Escape::Tmp(s, a.saturating_sub(1))),
            ok => render(ok),
        }),
        Primitive::new("restore", |t| match parse(t) {
            Escape::Tmp(s, a) if s <= a => render(Escape::Ok(a)),
            other => render(other),
        }),
    ]
    .into_iter()
    .map(Primitive::inflationary)
    .collect();
    StateDomain::new(
        "escape",
        names.clone(),
        |a, b| snapshot(parse(a)) <= snapshot(parse(b)),
        names,
        false,
        prims,
    )
}
