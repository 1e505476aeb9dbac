//! Instrumented small-step semantics over configurations `(e, σ, W)`, the
//! formula evaluator, and the runtime harness that checks the metatheory
//! along traces.

mod formula;
mod harness;
mod step;

pub use formula::{eval_formula, is_normal, normalize, values_of, EvalEnv, EvalError, Truth};
pub use harness::{
    export_trace, harness_check, replay_trace, stability, wf_state_log, HarnessReport, ReplayError, Stability,
    Violation, WfError,
};
pub use step::{
    returned_value, run, run_from, step, Configuration, StepResult, Terminal, Trace, WitnessLog, DEFAULT_FUEL,
};
