//! Export a trace in the line-oriented format and re-check it offline,
//! then show that a doctored trace is caught.

use monostate::ast::ValueTerm;
use monostate::domains::{DomainRegistry, StateDomain};
use monostate::eval::{export_trace, replay_trace, run, DEFAULT_FUEL};
use monostate::parser::parse_comp;

fn main() {
    let dom = StateDomain::counter(32);
    let e = parse_comp("bind n = get<false> in bind u = put<false> (succ (succ n)) in witness<false> (s. rel c2 s)").unwrap();
    let text = export_trace(&run(&e, &ValueTerm::constant("c0"), &dom, DEFAULT_FUEL), &dom);
    print!("{text}");
    let registry = DomainRegistry::builtin();
    println!("replay: {}", replay_trace(&text, &registry).unwrap());

    let doctored = text.replace("\tc2\t1", "\tc1\t1");
    println!("doctored replay: {}", replay_trace(&doctored, &registry).unwrap());
}
