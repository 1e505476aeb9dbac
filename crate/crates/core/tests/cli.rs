mod common;

use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> String {
    common::corpus_dir().join(name).to_string_lossy().into_owned()
}

fn mst(args: &[&str]) -> Output {
    mst_env(args, &[])
}

fn mst_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mst"));
    cmd.args(args).env_remove("MST_PROVER_DEPTH");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mst-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn check_accepts_counter() {
    let o = mst(&["check", &corpus("counter.mst")]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).ends_with("verdict: ACCEPT\n"));
}

#[test]
fn check_rejects_broken_reify_and_names_the_obligation() {
    let o = mst(&["check", &corpus("broken_reify.mst")]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    assert!(out.contains("Sub-MST post"), "{out}");
    assert!(out.contains("Unknown"), "{out}");
    assert!(out.ends_with("verdict: REJECT\n"));
}

#[test]
fn machine_format_has_one_row_per_obligation() {
    let o = mst(&["check", "--format", "machine", &corpus("counter.mst")]);
    let rows: Vec<_> = stdout(&o).lines().map(|l| l.split('\t').count()).collect();
    assert_eq!(rows, vec![3; 5]);
}

#[test]
fn usage_and_parse_errors_exit_2() {
    assert_eq!(code(&mst(&["frobnicate"])), 2);
    assert_eq!(code(&mst(&["check", "/nonexistent.mst"])), 2);
    let bad = scratch("bad.mst", "domain counter;\nmain : MST⟨false⟩ unit (s. top) (s x s'. top) = bind x = in get⟨false⟩;\n");
    let o = mst(&["check", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.mst:2:58: unexpected `in`"), "{o:?}");
}

#[test]
fn prove_reports_proofs_and_exhaustion() {
    let o = mst(&["prove", &corpus("weaken.seq")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("Witnessed-Weaken-SC"));
    let o = mst(&["prove", &corpus("false.seq")]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("search exhausted at depth 8: Unknown"));
}

#[test]
fn depth_env_var_overrides_default() {
    let o = mst_env(&["prove", &corpus("false.seq")], &[("MST_PROVER_DEPTH", "3")]);
    assert!(stdout(&o).contains("depth 3"));
    // Too shallow to discharge the counter's obligations.
    let o = mst_env(&["check", &corpus("counter.mst")], &[("MST_PROVER_DEPTH", "0")]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
}

#[test]
fn run_counter_with_harness() {
    let o = mst(&["--seed", "7", "run", "--state", "c0", &corpus("counter.mst")]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("done: ()"));
    assert!(out.contains("final state: c1"));
    assert!(out.contains("harness: ok"));
}

#[test]
fn out_of_fuel_is_a_resource_error() {
    let o = mst(&["run", "--fuel", "2", &corpus("counter.mst")]);
    assert_eq!(code(&o), 3, "{}", stdout(&o));
}

#[test]
fn unknown_state_is_a_usage_error() {
    assert_eq!(code(&mst(&["run", "--state", "c5", &corpus("heap.mst")])), 2);
}

#[test]
fn exported_traces_replay_and_tampering_is_caught() {
    let dir = std::env::temp_dir().join(format!("mst-trace-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let trace = dir.join("counter.tsv");
    let o = mst(&["run", "--state", "c3", "--trace", trace.to_str().unwrap(), &corpus("counter.mst")]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&mst(&["trace-replay", trace.to_str().unwrap()])), 0);

    // Move the last state backwards.
    let text = std::fs::read_to_string(&trace).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let last = lines.pop().unwrap();
    let mut cols: Vec<&str> = last.split('\t').collect();
    cols[2] = "c0";
    lines.push(cols.join("\t"));
    let bad = scratch("tampered.tsv", &(lines.join("\n") + "\n"));
    let o = mst(&["trace-replay", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
    assert!(stdout(&o).contains("preorder"));

    let junk = scratch("junk.tsv", "not a trace\n");
    assert_eq!(code(&mst(&["trace-replay", junk.to_str().unwrap()])), 2);
}

#[test]
fn obligations_without_discharge() {
    let o = mst(&["obligations", "--depth", "0", &corpus("counter.mst")]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.ends_with("5 obligations\n"), "{out}");
    assert!(out.contains("[Sub-MST post at 5:1]"));
}

#[test]
fn output_is_deterministic() {
    for args in [vec!["check"], vec!["run"], vec!["obligations"]] {
        let mut a = args.clone();
        let f = corpus("noninterference.mst");
        a.push(&f);
        assert_eq!(mst(&a).stdout, mst(&a).stdout, "{args:?}");
    }
}

#[test]
fn every_corpus_program_checks_as_labelled() {
    for (name, _) in common::corpus("mst") {
        let o = mst(&["check", &corpus(&name)]);
        let expected = if name.starts_with("broken") { 1 } else { 0 };
        assert_eq!(code(&o), expected, "{name}\n{}", stdout(&o));
    }
}
