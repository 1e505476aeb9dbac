//! Parse a program, print it canonically, and parse the output again.

use monostate::ast::alpha_eq;
use monostate::parser::{parse_program, pretty_program};

const SRC: &str = r"
domain counter;

let bump = fun (u:unit) -> bind n = get<false> in put<false> (succ n);

main : MST<false> unit (s. top) (s x s'. rel (succ s) s') =
  bump ();
";

fn main() {
    let prog = parse_program(SRC).expect("parses");
    let printed = pretty_program(&prog);
    print!("{printed}");
    let again = parse_program(&printed).expect("printed form parses");
    assert!(alpha_eq(&prog.main.body, &again.main.body));
    assert!(alpha_eq(&prog.decls[0].value, &again.decls[0].value));
    println!("round trip: ok");
}
