//! Reified computations are plain state-passing functions: two different
//! implementations of "add two" cannot be told apart through `reify`.

use monostate::ast::ValueTerm;
use monostate::domains::StateDomain;
use monostate::eval::{run, DEFAULT_FUEL};
use monostate::parser::{parse_comp_in, parse_program};
use monostate::typecheck::link;

const SRC: &str = r"
domain counter;

let incr1 = fun (u:unit) -> bind n = get<true> in put<true> (succ n);

let incr2 = fun (h:bool) ->
  if h then { bind n = get<true> in put<true> (succ (succ n)) }
  else { bind u = incr1 () in incr1 () };

main : MST<false> unit (s. top) (s x s'. top) = return<false> ();
";

fn main() {
    let mut prog = parse_program(SRC).unwrap();
    let dom = StateDomain::counter(32);
    let scope = ["incr1".to_string(), "incr2".to_string()];
    for start in ["c0", "c5", "c31"] {
        let mut results = Vec::new();
        for h in ["false", "true"] {
            prog.main.body = parse_comp_in(&format!("(reify {{incr2 {h}}}) {start}"), &scope).unwrap();
            let trace = run(&link(&prog), &ValueTerm::constant("c0"), &dom, DEFAULT_FUEL);
            results.push(trace.value().unwrap().clone());
        }
        println!("from {start}: h=false -> {}, h=true -> {}", results[0], results[1]);
        assert_eq!(results[0], results[1]);
    }
}
