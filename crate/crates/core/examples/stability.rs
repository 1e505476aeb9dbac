//! Which predicates may be witnessed? Only those preserved by the preorder.

use monostate::ast::Formula;
use monostate::domains::StateDomain;
use monostate::eval::stability;
use monostate::parser::parse_formula;

fn main() {
    let dom = StateDomain::counter(32);
    for src in ["rel c3 s", "rel (succ c3) s /\\ rel c1 s", "s == c3", "rel s c3", "rel c0 s \\/ s == c7"] {
        let Formula::Witnessed(p) = parse_formula(&format!("witnessed (s. {src})")).unwrap() else { unreachable!() };
        match stability(&dom, &p, 6) {
            Ok(how) => println!("{src:<28} stable ({how})"),
            Err(why) => println!("{src:<28} {why}"),
        }
    }
}
