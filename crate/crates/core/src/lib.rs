//! Monotonic-state calculi with Hoare-style computation types.
//!
//! The crate parses programs and formulas, typechecks computations against
//! pre/postcondition types over a preordered state, discharges the resulting
//! logical obligations with a cut-free sequent prover, and runs programs
//! under an instrumented small-step semantics that checks the metatheory
//! dynamically.

pub mod ast;
pub mod cli;
pub mod domains;
pub mod eval;
pub mod logic;
pub mod parser;
pub mod typecheck;
