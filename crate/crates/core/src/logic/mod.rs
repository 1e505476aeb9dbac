//! First-order logic over `rel`, `==` and `witnessed`: sequents, a checked
//! cut-free sequent calculus with bounded search, natural deduction, and the
//! meta-level operations used by the typechecker and the runtime harness.

mod atomic;
mod meta;
mod nd;
mod proof;
mod search;
mod sequent;
pub mod terms;

pub use atomic::close_atomic;
pub use meta::{
    cut_elim_check, cut_elim_check_with, prove_or_none, stable_formula, witnessed_conj, witnessed_inversion, MetaError,
};
pub use nd::{check_nd, sc_to_nd, NdDerivation, NdError, NdRule};
pub use proof::{check_proof, Proof, ProofError, Rule};
pub use search::{sc_prove, sc_prove_with, ProveOutcome, ProverConfig, ProverError, DEFAULT_NODE_BUDGET};
pub use sequent::{FormulaSet, Sequent};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_sequent;

    fn prove(src: &str, depth: usize) -> ProveOutcome {
        let seq = parse_sequent(src).unwrap();
        let out = sc_prove(&seq, depth).unwrap();
        if let ProveOutcome::Proved(p) = &out {
            check_proof(p).unwrap_or_else(|e| panic!("{e}\n{}", p.render()));
            assert_eq!(p.conclusion, seq);
        }
        out
    }

    #[test]
    fn rel_refl() {
        let ProveOutcome::Proved(p) = prove("|- rel c0 c0", 8) else { panic!() };
        assert!(p.uses("Rel-Refl-SC"));
    }

    #[test]
    fn witnessed_weaken() {
        let ProveOutcome::Proved(p) = prove("witnessed (s. rel c0 s /\\ rel c1 s) |- witnessed (s. rel c0 s)", 8) else {
            panic!()
        };
        assert_eq!(p.rule.name(), "Witnessed-Weaken-SC");
        assert!(p.uses("And-L"));
        assert!(p.uses("Ax"));
    }

    #[test]
    fn bottom_is_not_provable() {
        for d in 0..=8 {
            assert_eq!(prove("|- bot", d), ProveOutcome::Unknown(d));
        }
    }

    #[test]
    fn stability_of_point_predicate_is_unknown() {
        let pred = crate::ast::Predicate::new(
            "s",
            crate::ast::Formula::eq(crate::ast::ValueType::State, crate::ast::ValueTerm::var("s"), crate::ast::ValueTerm::constant("c0")),
        );
        let goal = Sequent::from_formulas(Default::default(), vec![], vec![stable_formula(&pred)]);
        assert_eq!(sc_prove(&goal, 8).unwrap(), ProveOutcome::Unknown(8));
    }

    #[test]
    fn quantifier_instantiation() {
        assert!(prove("forall s:state. rel s (succ s) |- rel c0 (succ (succ c0))", 4).is_proved());
        assert!(prove("rel c0 c1 |- exists x:state. rel c0 x", 2).is_proved());
        assert!(prove("|- exists x:state. rel x c0", 2).is_proved());
    }

    #[test]
    fn classical_tautologies() {
        assert!(prove("|- rel c0 c1 \\/ (rel c0 c1 ==> bot)", 0).is_proved());
        assert!(prove("((rel c0 c1 ==> rel c1 c0) ==> rel c0 c1) |- rel c0 c1", 0).is_proved());
    }

    #[test]
    fn boolean_case_split() {
        assert!(prove("b:bool | |- b ==[bool] false \\/ b ==[bool] true", 1).is_proved());
    }
}
