//! Typecheck a program: print each logical obligation with the rule that
//! produced it and whether the prover discharged it.

use monostate::domains::StateDomain;
use monostate::parser::parse_program;
use monostate::typecheck::{check_program, CheckConfig};

const SRC: &str = r"
domain counter;

main : MST<false> unit (s. top) (s x s'. rel (succ s) s' /\ witnessed (t. rel (succ s) t)) =
  bind n = get<false> in
  bind u = put<false> (succ n) in
  witness<false> (t. rel (succ n) t);
";

fn main() {
    let prog = parse_program(SRC).unwrap();
    let report = check_program(&prog, &StateDomain::counter(32), &CheckConfig::with_depth(10)).expect("well-typed");
    println!("{}", report.render_text());

    // Claiming more than the program establishes leaves an obligation open.
    let greedy = SRC.replace("rel (succ s) s'", "rel (succ (succ s)) s'");
    let prog = parse_program(&greedy).unwrap();
    let report = check_program(&prog, &StateDomain::counter(32), &CheckConfig::with_depth(10)).unwrap();
    println!("\nwith a stronger postcondition:");
    println!("{}", report.render_text());
}
