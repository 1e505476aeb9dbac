//! The proof-theoretic checks: witnessed inversion and sampled cut
//! admissibility.

use monostate::logic::{check_proof, cut_elim_check, prove_or_none, witnessed_inversion, ProverConfig};
use monostate::parser::{parse_formula, parse_sequent};

fn main() {
    // Inversion: a proof of `Φ, witnessed φ ⊢ witnessed φ'` yields one of `Φ, φ ⊢ φ'`.
    let seq = parse_sequent("rel c0 c1, witnessed (s. rel c1 s) |- witnessed (s. rel c0 s)").unwrap();
    let p = prove_or_none(&seq, &ProverConfig::with_depth(6)).unwrap().expect("provable");
    println!("{}", p.render());
    let (v, q) = witnessed_inversion(&p).unwrap();
    check_proof(&q).unwrap();
    println!("inverted at `{v}`:\n{}", q.render());

    // Cut: both premises provable, so the conclusion is provable without cut.
    let s1 = parse_sequent("rel c0 c1, rel c1 c2 |- rel c0 c2").unwrap();
    let s2 = parse_sequent("rel c0 c1, rel c1 c2, rel c0 c2 |- exists x:state. rel c0 x /\\ rel x c2").unwrap();
    let cut = parse_formula("rel c0 c2").unwrap();
    println!("cut on `{cut}` admissible: {}", cut_elim_check(&s1, &s2, &cut, 5).unwrap());
}
