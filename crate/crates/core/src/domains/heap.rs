use super::{Primitive, StateDomain};

const UNUSED: char = 'u';
const PAYLOADS: [char; 2] = ['a', 'b'];

fn cells(name: &str) -> Vec<char> {
    name.strip_prefix("h_").expect("heap state").chars().collect()
}

fn render(cells: &[char]) -> String {
    format!("h_{}", cells.iter().collect::<String>())
}

/// Finite maps from `0..cells` to `Unused | Used(a) | Used(b)`, rendered as
/// constants such as `h_ua`. A used identifier stays used.
pub(super) fn heap(n: usize) -> StateDomain {
    assert!((1..=3).contains(&n), "heap sample is enumerated for 1..=3 cells");
    let mut states = vec![String::new()];
    for _ in 0..n {
        states = states
            .into_iter()
            .flat_map(|p| [UNUSED, PAYLOADS[0], PAYLOADS[1]].map(|c| format!("{p}{c}")))
            .collect();
    }
    let names: Vec<String> = states.iter().map(|s| format!("h_{s}")).collect();
    let mut prims = Vec::new();
    for i in 0..n {
        prims.push(
            Primitive::new(format!("alloc{i}"), move |s| {
                let mut c = cells(s);
                if c[i] == UNUSED {
                    c[i] = PAYLOADS[0];
                }
                render(&c)
            })
            .inflationary(),
        );
        prims.push(
            Primitive::new(format!("set{i}"), move |s| {
                let mut c = cells(s);
                if c[i] != UNUSED {
                    c[i] = PAYLOADS[1];
                }
                render(&c)
            })
            .inflationary(),
        );
    }
    let used_preserved = |a: &str, b: &str| cells(a).iter().zip(cells(b)).all(|(x, y)| *x == UNUSED || y != UNUSED);
    StateDomain::new("heap", names.clone(), used_preserved, names, true, prims)
}
