//! New actions from state-passing functions. Inside `reflect` the state may
//! take detours the preorder forbids; only the committed result is checked.

use monostate::ast::ValueTerm;
use monostate::domains::StateDomain;
use monostate::eval::{harness_check, run, DEFAULT_FUEL};
use monostate::parser::parse_program;
use monostate::typecheck::{check_program, link, CheckConfig};

const SRC: &str = r"
domain escape;

let wobble = fun (u:unit) -> reflect (fun (s:state) -> return ((), restore (bump (bump (drop (brk s))))));

main : MST<false> unit (s. top) (s x s'. rel s s') =
  bind a = coerce { wobble () } in
  coerce { wobble () };
";

fn main() {
    let prog = parse_program(SRC).unwrap();
    let dom = StateDomain::escape(4);
    let report = check_program(&prog, &dom, &CheckConfig::with_depth(10)).unwrap();
    println!("verdict: {}", if report.accepted() { "ACCEPT" } else { "REJECT" });

    let trace = run(&link(&prog), &ValueTerm::constant("ok0"), &dom, DEFAULT_FUEL);
    let states: Vec<String> = trace.configs.iter().map(|c| c.state.to_string()).collect();
    println!("states: {}", states.join(" -> "));
    println!("{}", harness_check(&trace, &dom, 4, Some(&prog.main.ty)));
}
