//! Prove a sequent with the bounded cut-free search, check the proof
//! independently, and translate it to natural deduction.

use monostate::logic::{check_nd, check_proof, sc_prove, sc_to_nd, ProveOutcome};
use monostate::parser::parse_sequent;

fn main() {
    let goals = [
        "witnessed (s. rel c0 s /\\ rel c1 s) |- witnessed (s. rel c0 s)",
        "rel c0 c1, rel c1 c2 |- exists x:state. rel c0 x /\\ rel x c2",
        "|- bot",
    ];
    for src in goals {
        let goal = parse_sequent(src).unwrap();
        match sc_prove(&goal, 8).unwrap() {
            ProveOutcome::Proved(p) => {
                check_proof(&p).expect("search only returns checkable proofs");
                let nd = sc_to_nd(&p);
                check_nd(&nd).expect("translation is checkable");
                println!("{}", p.render());
                println!("  depth {}, {} steps; natural deduction: {} nodes\n", p.depth(), p.size(), nd.size());
            }
            ProveOutcome::Unknown(d) => println!("{goal}\n  no proof up to depth {d}\n"),
        }
    }
}
