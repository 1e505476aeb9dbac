use super::*;
use crate::domains::StateDomain;
use crate::parser::{parse_comp, parse_comp_type, parse_program, parse_type};

fn infer(src: &str) -> Result<(CompType, Vec<Obligation>), TypeError> {
    infer_comp(&TypingContext::new(), &parse_comp(src).unwrap())
}

fn ty(src: &str) -> CompType {
    parse_comp_type(src).unwrap()
}

fn check(src: &str, c: &str) -> CheckReport {
    let dom = StateDomain::counter(32);
    check_comp(&TypingContext::new(), &parse_comp(src).unwrap(), &ty(c), Some(&dom), &CheckConfig::with_depth(8)).unwrap()
}

#[test]
fn get_has_its_axiomatic_type() {
    let (c, obs) = infer("get⟨false⟩").unwrap();
    assert!(alpha_eq(&c, &ty("MST⟨false⟩ state (s. top) (s x s'. s == x /\\ x == s')")));
    assert!(obs.is_empty());
}

#[test]
fn put_requires_a_forward_move() {
    let (c, _) = infer("put⟨false⟩ c1").unwrap();
    assert!(alpha_eq(&c, &ty("MST⟨false⟩ unit (s. rel s c1) (s x s'. s' == c1)")));
}

#[test]
fn witness_and_recall_are_vacuous_at_index_true() {
    let (c, _) = infer("witness⟨true⟩ (s. rel c0 s)").unwrap();
    assert!(alpha_eq(&c, &ty("MST⟨true⟩ unit (s. top) (s x s'. s == s')")));
    let (c, _) = infer("recall⟨false⟩ (s. rel c0 s)").unwrap();
    assert!(alpha_eq(&c, &ty("MST⟨false⟩ unit (s. witnessed (t. rel c0 t)) (s x s'. s == s' /\\ rel c0 s')")));
}

#[test]
fn coerce_from_false_is_rejected() {
    let err = infer("coerce {return⟨false⟩ ()}").unwrap_err();
    assert!(err.message.contains("coerce requires index true"), "{err}");
    assert!(infer("coerce {get⟨true⟩}").is_ok());
}

#[test]
fn reify_requires_index_true() {
    let err = infer("return (reify get⟨false⟩)").unwrap_err();
    assert!(err.message.contains("reify requires index true"), "{err}");
}

#[test]
fn wellformedness_diagnostics() {
    let ctx = TypingContext::new();
    let bad = Formula::Atom(AtomHead::Rel, vec![ValueTerm::var("s")]);
    let err = wf_formula(&ctx.with("s", ValueType::State), &bad).unwrap_err();
    assert!(err.message.contains("expects 2 arguments"), "{err}");
    let err = wf_comp_type(&ctx, &ty("MST⟨()⟩ unit (s. top) (s x s'. top)")).unwrap_err();
    assert!(err.message.contains("expected bool"), "{err}");
    let err = infer_value(&ctx, &ValueTerm::var("x")).unwrap_err();
    assert!(err.message.contains("unbound variable `x`"), "{err}");
    let dom = StateDomain::counter(4);
    let err = Checker::new(Some(&dom)).infer_value(&ctx, &ValueTerm::constant("x")).unwrap_err();
    assert!(err.message.contains("neither bound nor a state"), "{err}");
    assert!(wf_type(&ctx, &parse_type("(x:state) -> MST⟨false⟩ unit (s. rel x s) (s y s'. top)").unwrap()).is_ok());
}

#[test]
fn preorder_hypothesis_only_in_post_obligation() {
    let r = check("get⟨false⟩", "MST⟨false⟩ state (s. top) (s x s'. x == s')");
    let rels = |rule: &str| {
        r.obligations
            .iter()
            .filter(|o| o.rule == rule)
            .all(|o| o.sequent.left.iter().any(|f| matches!(f, Formula::Atom(AtomHead::Rel, _))))
    };
    assert!(rels("Sub-MST post"));
    assert!(!rels("Sub-MST pre"));
    assert!(r.accepted());
}

#[test]
fn weaker_postcondition_is_accepted() {
    assert!(check("get⟨false⟩", "MST⟨false⟩ state (s. top) (s x s'. top)").accepted());
    assert!(!check("get⟨false⟩", "MST⟨false⟩ state (s. top) (s x s'. rel c1 s')").accepted());
}

#[test]
fn obligations_are_deterministic() {
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus/counter.mst")).unwrap();
    let prog = parse_program(&src).unwrap();
    let dom = StateDomain::counter(32);
    let a = generate_program(&prog, &dom).unwrap().obligations;
    let b = generate_program(&prog, &dom).unwrap().obligations;
    assert_eq!(a, b);
    assert!(a.iter().all(|o| o.pos.is_some()));
}

#[test]
fn case_on_literal_takes_one_branch() {
    let (c, _) = infer("if true then put⟨false⟩ c1 else return⟨false⟩ ()").unwrap();
    assert!(alpha_eq(&c, &ty("MST⟨false⟩ unit (s. rel s c1) (s x s'. s' == c1)")));
}
