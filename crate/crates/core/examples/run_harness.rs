//! Run a program under the instrumented semantics and check every step of
//! the trace against the runtime harness.

use monostate::ast::ValueTerm;
use monostate::domains::StateDomain;
use monostate::eval::{harness_check, run, DEFAULT_FUEL};
use monostate::parser::parse_program;
use monostate::typecheck::link;

const SRC: &str = r"
domain counter;

main : MST<false> unit (s. top) (s x s'. rel (succ s) s' /\ witnessed (t. rel (succ s) t)) =
  bind n = get<false> in
  bind u = put<false> (succ n) in
  bind w = witness<false> (t. rel (succ n) t) in
  recall<false> (t. rel (succ n) t);
";

fn main() {
    let prog = parse_program(SRC).unwrap();
    let dom = StateDomain::counter(32);
    let trace = run(&link(&prog), &ValueTerm::constant("c4"), &dom, DEFAULT_FUEL);
    for (i, c) in trace.configs.iter().enumerate() {
        let rule = if i == 0 { "start" } else { trace.rules[i - 1] };
        println!("{i:>2} {rule:<14} state {:<3} log {}", c.state, c.log.len());
    }
    println!("ended: {:?}\n", trace.end);
    println!("{}", harness_check(&trace, &dom, 4, Some(&prog.main.ty)));
}
