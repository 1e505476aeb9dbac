mod common;

use common::Gen;
use monostate::ast::*;
use monostate::domains::StateDomain;
use monostate::eval::{run, step, Configuration, Terminal};
use monostate::logic::*;
use monostate::parser::*;
use monostate::typecheck::TypingContext;
use proptest::prelude::*;

fn small() -> ProverConfig {
    ProverConfig { node_budget: 20_000, ..ProverConfig::with_depth(4) }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn comp_round_trip(seed in any::<u64>()) {
        let e = Gen::new(seed).comp(&[], 3);
        let printed = pretty_comp(&e);
        let back = parse_comp(&printed).map_err(|err| TestCaseError::fail(format!("{err}\n{printed}")))?;
        prop_assert!(alpha_eq(&back, &e), "{printed}\n{}", pretty_comp(&back));
    }

    #[test]
    fn formula_round_trip(seed in any::<u64>()) {
        let f = Gen::new(seed).formula(&[], 3);
        let printed = pretty_formula(&f);
        let back = parse_formula(&printed).map_err(|err| TestCaseError::fail(format!("{err}\n{printed}")))?;
        prop_assert!(alpha_eq(&back, &f), "{printed}\n{}", pretty_formula(&back));
    }

    #[test]
    fn type_round_trip(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let t = g.value_type(3);
        let printed = pretty_type(&t);
        let back = parse_type(&printed).map_err(|err| TestCaseError::fail(format!("{err}\n{printed}")))?;
        prop_assert!(alpha_eq(&back, &t), "{printed}");
        let c = g.comp_type(&[], 2);
        let printed = pretty_comp_type(&c);
        let back = parse_comp_type(&printed).map_err(|err| TestCaseError::fail(format!("{err}\n{printed}")))?;
        prop_assert!(alpha_eq(&back, &c), "{printed}");
    }

    #[test]
    fn truncated_input_never_panics(seed in any::<u64>(), cut in 0usize..200) {
        let printed = pretty_comp(&Gen::new(seed).comp(&[], 3));
        let end = printed.char_indices().map(|(i, _)| i).nth(cut).unwrap_or(printed.len());
        let _ = parse_comp(&printed[..end]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn proofs_found_are_checked(seed in any::<u64>()) {
        let goal = Gen::new(seed).sequent();
        if let Ok(ProveOutcome::Proved(p)) = sc_prove_with(&goal, &small()) {
            prop_assert_eq!(&p.conclusion, &goal);
            prop_assert!(check_proof(&p).is_ok(), "{}", p.render());
            let nd = sc_to_nd(&p);
            prop_assert!(check_nd(&nd).is_ok(), "{}", nd.render());
        }
    }

    #[test]
    fn witnessed_weaken_is_functorial(seed in any::<u64>()) {
        let goal = Gen::new(seed).inversion_candidate();
        // Re-shape the candidate into `s:state | φ ⊢ φ'`.
        let (Some(Formula::Witnessed(p)), Some(Formula::Witnessed(q))) =
            (goal.left.iter().find(|f| matches!(f, Formula::Witnessed(_))), goal.right.iter().next())
        else { unreachable!() };
        let s = ValueTerm::var("s");
        let inner = Sequent::from_formulas(
            TypingContext::new().with("s", ValueType::State),
            vec![p.apply(&s)],
            vec![q.apply(&s)],
        );
        if let Ok(ProveOutcome::Proved(pi)) = sc_prove_with(&inner, &small()) {
            let outer = Sequent::from_formulas(
                TypingContext::new(),
                vec![Formula::Witnessed(p.clone())],
                vec![Formula::Witnessed(q.clone())],
            );
            let cfg = ProverConfig { max_depth: pi.depth() + 1, ..small() };
            prop_assert!(sc_prove_with(&outer, &cfg).unwrap().is_proved());
        }
    }

    #[test]
    fn inversion_yields_checked_proofs(seed in any::<u64>()) {
        let goal = Gen::new(seed).inversion_candidate();
        if let Ok(ProveOutcome::Proved(p)) = sc_prove_with(&goal, &small()) {
            let (v, q) = witnessed_inversion(&p).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert!(check_proof(&q).is_ok());
            prop_assert_eq!(q.conclusion.ctx.lookup(&v), Some(&ValueType::State));
        }
    }

    #[test]
    fn cut_is_admissible_on_samples(seed in any::<u64>()) {
        let (s1, s2, a) = Gen::new(seed).cut_candidate();
        let cfg = ProverConfig { node_budget: 20_000, ..ProverConfig::with_depth(3) };
        match cut_elim_check_with(&s1, &s2, &a, &cfg) {
            Ok(ok) => prop_assert!(ok),
            Err(MetaError::Precondition(_)) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn step_is_deterministic(seed in any::<u64>(), start in 0usize..10) {
        let dom = StateDomain::counter(32);
        let e = Gen::new(seed).runnable(&[], 3);
        let mut c = Configuration::new(e, ValueTerm::constant(format!("c{start}")));
        for _ in 0..200 {
            let (a, b) = (step(&c, &dom), step(&c, &dom));
            prop_assert_eq!(&a, &b);
            match a {
                monostate::eval::StepResult::Stepped(next, _) => c = next,
                _ => break,
            }
        }
    }

    #[test]
    fn generated_terms_terminate_and_reflect_coherently(seed in any::<u64>(), start in 0usize..30) {
        let dom = StateDomain::counter(32);
        let e = Gen::new(seed).runnable(&[], 3);
        let sigma = ValueTerm::constant(format!("c{start}"));
        let direct = run(&e, &sigma, &dom, 10_000);
        prop_assert!(matches!(direct.end, Terminal::Done(_)), "{}: {:?}", pretty_comp(&e), direct.end);
        let wrapped = CompTerm::Reflect(ValueTerm::Reify(Box::new(e.clone())));
        let via = run(&wrapped, &sigma, &dom, 10_000);
        prop_assert_eq!(direct.value(), via.value());
        prop_assert_eq!(&direct.last().state, &via.last().state);
        prop_assert!(direct.last().log.is_subset(&via.last().log) && via.last().log.is_subset(&direct.last().log));
    }
}
