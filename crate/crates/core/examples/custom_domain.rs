//! Plug in a new state domain: a three-position ratchet that can only be
//! advanced. Registration checks the preorder laws and primitive axioms.

use monostate::domains::{DomainRegistry, Primitive, StateDomain};
use monostate::parser::parse_program;
use monostate::typecheck::{check_program, CheckConfig};

const SRC: &str = r"
domain ratchet;

main : MST<false> unit (s. top) (s x s'. rel s s' /\ rel (click s) s') =
  bind n = get<false> in
  put<false> (click n);
";

fn main() {
    let states: Vec<String> = ["low", "mid", "high"].map(String::from).to_vec();
    let rank = |s: &str| ["low", "mid", "high"].iter().position(|x| *x == s).unwrap();
    let click = Primitive::new("click", move |s| ["mid", "high", "high"][rank(s)].to_string()).inflationary();
    let ratchet = StateDomain::new("ratchet", states.clone(), move |a, b| rank(a) <= rank(b), states, true, vec![click]);

    let mut registry = DomainRegistry::builtin();
    let dom = registry.register(ratchet).expect("lawful domain");

    // A primitive that moves backwards contradicts its declared axiom.
    let names: Vec<String> = ["low", "high"].map(String::from).to_vec();
    let back = Primitive::new("back", |_| "low".to_string()).inflationary();
    let bad = StateDomain::new("bad", names.clone(), |a, b| a == b || a == "low", names, true, vec![back]);
    println!("registering `bad`: {}", registry.register(bad).unwrap_err());

    let prog = parse_program(SRC).unwrap();
    let report = check_program(&prog, &dom, &CheckConfig::with_depth(10)).unwrap();
    println!("{}", report.render_text());
}
