//! The `mst` command line: `check`, `run`, `prove`, `obligations` and
//! `trace-replay`. Exit codes: 0 ok, 1 reject, 2 usage or parse error,
//! 3 resource limit (fuel or prover budget).

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::domains::{DomainRegistry, StateDomain};
use crate::eval::{export_trace, harness_check, replay_trace, run, ReplayError, Terminal, DEFAULT_FUEL};
use crate::logic::{check_nd, check_proof, sc_prove_with, sc_to_nd, ProveOutcome, ProverConfig, ProverError};
use crate::parser::{parse_program, parse_sequent, parse_value, SourceProgram};
use crate::typecheck::{check_program, generate_program, link, CheckConfig, PROVER_DEPTH_ENV};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    Reject = 1,
    Usage = 2,
    Resource = 3,
}

#[derive(Debug, Parser)]
#[command(name = "mst", version, about = "Typecheck, run and prove things about monotonic-state programs")]
pub struct Cli {
    /// Seed for randomized generators; commands are deterministic for a given seed.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Typecheck a program and discharge its obligations.
    Check {
        file: PathBuf,
        #[arg(long, env = PROVER_DEPTH_ENV, default_value_t = 10)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Typecheck, then run a program under the instrumented semantics.
    Run {
        file: PathBuf,
        /// Initial state; defaults to the domain's first constant.
        #[arg(long)]
        state: Option<String>,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: usize,
        /// Write the trace to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Switch::On)]
        harness: Switch,
        /// Skip typechecking.
        #[arg(long)]
        unchecked: bool,
        #[arg(long, env = PROVER_DEPTH_ENV, default_value_t = 10)]
        depth: usize,
    },
    /// Prove the sequent in a `.seq` file.
    Prove {
        file: PathBuf,
        #[arg(long, env = PROVER_DEPTH_ENV, default_value_t = 8)]
        depth: usize,
        /// Also print the natural-deduction translation.
        #[arg(long)]
        nd: bool,
    },
    /// List a program's obligations; with depth 0 they are not attempted.
    Obligations {
        file: PathBuf,
        #[arg(long, env = PROVER_DEPTH_ENV, default_value_t = 10)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Re-check an exported trace.
    TraceReplay { file: PathBuf },
}

/// Parses arguments from the process and runs; returns the exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    execute(&cli, &mut stdout.lock(), &mut stderr.lock()) as i32
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

macro_rules! say {
    ($w:expr, $($arg:tt)*) => {{
        let _ = writeln!($w, $($arg)*);
    }};
}

pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Exit {
    let mut io = Io { out, err };
    let r = match &cli.command {
        Command::Check { file, depth, format } => cmd_check(&mut io, file, *depth, *format),
        Command::Run { file, state, fuel, trace, harness, unchecked, depth } => {
            cmd_run(&mut io, file, state.as_deref(), *fuel, trace.as_deref(), *harness == Switch::On, *unchecked, *depth)
        }
        Command::Prove { file, depth, nd } => cmd_prove(&mut io, file, *depth, *nd),
        Command::Obligations { file, depth, format } => cmd_obligations(&mut io, file, *depth, *format),
        Command::TraceReplay { file } => cmd_replay(&mut io, file),
    };
    r.unwrap_or_else(|(code, msg)| {
        say!(io.err, "error: {msg}");
        code
    })
}

type CmdResult = Result<Exit, (Exit, String)>;

fn usage(msg: impl std::fmt::Display) -> (Exit, String) {
    (Exit::Usage, msg.to_string())
}

fn read(file: &Path) -> Result<String, (Exit, String)> {
    std::fs::read_to_string(file).map_err(|e| usage(format!("{}: {e}", file.display())))
}

fn load(file: &Path) -> Result<(SourceProgram, std::sync::Arc<StateDomain>), (Exit, String)> {
    let src = read(file)?;
    let prog = parse_program(&src).map_err(|e| usage(format!("{}:{e}", file.display())))?;
    let dom = DomainRegistry::builtin().lookup(&prog.domain).map_err(usage)?;
    Ok((prog, dom))
}

fn cmd_check(io: &mut Io, file: &Path, depth: usize, format: Format) -> CmdResult {
    let (prog, dom) = load(file)?;
    let report = match check_program(&prog, &dom, &CheckConfig::with_depth(depth)) {
        Ok(r) => r,
        Err(e) => {
            say!(io.out, "type error: {e}");
            return Ok(Exit::Reject);
        }
    };
    match format {
        Format::Text => say!(io.out, "{}", report.render_text()),
        Format::Machine => {
            let _ = write!(io.out, "{}", report.render_machine());
        }
    }
    Ok(if report.accepted() {
        Exit::Ok
    } else if report.out_of_budget() {
        Exit::Resource
    } else {
        Exit::Reject
    })
}

fn cmd_obligations(io: &mut Io, file: &Path, depth: usize, format: Format) -> CmdResult {
    if depth > 0 {
        return cmd_check(io, file, depth, format);
    }
    let (prog, dom) = load(file)?;
    let obligations = match generate_program(&prog, &dom) {
        Ok(g) => g.obligations,
        Err(e) => {
            say!(io.out, "type error: {e}");
            return Ok(Exit::Reject);
        }
    };
    for (i, ob) in obligations.iter().enumerate() {
        match format {
            Format::Text => say!(io.out, "{}. [{}] {}", i + 1, ob.provenance(), ob.sequent),
            Format::Machine => {
                let pos = ob.pos.map(|p| p.to_string()).unwrap_or_else(|| "-".into());
                say!(io.out, "{pos}\t{}\t{}", ob.rule, ob.sequent)
            }
        }
    }
    if format == Format::Text {
        say!(io.out, "{} obligations", obligations.len());
    }
    Ok(Exit::Ok)
}

fn cmd_prove(io: &mut Io, file: &Path, depth: usize, nd: bool) -> CmdResult {
    let src = read(file)?;
    let seq = parse_sequent(src.trim()).map_err(|e| usage(format!("{}:{e}", file.display())))?;
    match sc_prove_with(&seq, &ProverConfig::with_depth(depth)) {
        Ok(ProveOutcome::Proved(p)) => {
            if let Err(e) = check_proof(&p) {
                return Err((Exit::Reject, format!("internal: proof failed to check: {e}")));
            }
            say!(io.out, "{}", p.render());
            say!(io.out, "proved: {} (depth {}, {} rule applications, checked)", seq, p.depth(), p.size());
            if nd {
                let d = sc_to_nd(&p);
                match check_nd(&d) {
                    Ok(()) => say!(io.out, "natural deduction (checked):\n{}", d.render()),
                    Err(e) => return Err((Exit::Reject, format!("internal: ND translation failed to check: {e}"))),
                }
            }
            Ok(Exit::Ok)
        }
        Ok(ProveOutcome::Unknown(d)) => {
            say!(io.out, "search exhausted at depth {d}: Unknown");
            Ok(Exit::Reject)
        }
        Err(ProverError::Budget(n)) => {
            say!(io.out, "prover budget of {n} nodes exhausted: Unknown");
            Ok(Exit::Resource)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_run(
    io: &mut Io,
    file: &Path,
    state: Option<&str>,
    fuel: usize,
    trace_out: Option<&Path>,
    harness: bool,
    unchecked: bool,
    depth: usize,
) -> CmdResult {
    let (prog, dom) = load(file)?;
    if !unchecked {
        match check_program(&prog, &dom, &CheckConfig::with_depth(depth)) {
            Ok(r) if r.accepted() => {}
            Ok(r) => {
                say!(io.out, "{}", r.render_text());
                return Ok(if r.out_of_budget() { Exit::Resource } else { Exit::Reject });
            }
            Err(e) => {
                say!(io.out, "type error: {e}");
                return Ok(Exit::Reject);
            }
        }
    }
    let default_state = dom.constants()[0].clone();
    let sigma0 = match state {
        Some(s) => {
            let v = parse_value(s).map_err(|e| usage(format!("--state: {e}")))?;
            let name = dom.state_name(&v).map_err(|e| usage(format!("--state: {e}")))?;
            crate::ast::ValueTerm::Const(name)
        }
        None => crate::ast::ValueTerm::Const(default_state.clone()),
    };
    let t = run(&link(&prog), &sigma0, &dom, fuel);
    if let Some(path) = trace_out {
        std::fs::write(path, export_trace(&t, &dom)).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    }
    let last = t.last();
    let mut code = Exit::Ok;
    match &t.end {
        Terminal::Done(v) => {
            say!(io.out, "done: {v}");
            if let (Some(want), true) = (&prog.expect, sigma0 == crate::ast::ValueTerm::Const(default_state)) {
                if !crate::ast::alpha_eq(want, v) {
                    say!(io.out, "expected: {want}");
                    code = Exit::Reject;
                }
            }
        }
        Terminal::Stuck(m) => {
            say!(io.out, "stuck: {m}");
            code = Exit::Reject;
        }
        Terminal::OutOfFuel => {
            say!(io.out, "out of fuel after {} steps", t.steps());
            code = Exit::Resource;
        }
    }
    say!(io.out, "steps: {}", t.steps());
    say!(io.out, "initial state: {sigma0}");
    say!(io.out, "final state: {}", last.state);
    say!(io.out, "log size: {}", last.log.len());
    if harness {
        let r = harness_check(&t, &dom, 6, Some(&prog.main.ty));
        say!(io.out, "{r}");
        if !r.ok() && code == Exit::Ok {
            code = Exit::Reject;
        }
    }
    Ok(code)
}

fn cmd_replay(io: &mut Io, file: &Path) -> CmdResult {
    let text = read(file)?;
    match replay_trace(&text, &DomainRegistry::builtin()) {
        Ok(r) => {
            for v in &r.violations {
                say!(io.out, "violation {v}");
            }
            say!(io.out, "replayed {} steps: {}", r.steps, if r.ok() { "ok" } else { "FAILED" });
            Ok(if r.ok() { Exit::Ok } else { Exit::Reject })
        }
        Err(e @ ReplayError::Domain(_)) | Err(e @ ReplayError::Malformed(..)) | Err(e @ ReplayError::NoDomain) => {
            Err(usage(format!("{}: {e}", file.display())))
        }
    }
}
