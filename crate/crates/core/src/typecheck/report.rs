//! Obligation discharge and check reports.

use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::ast::*;
use crate::domains::StateDomain;
use crate::logic::{sc_prove_with, terms::primitives_in, Proof, ProveOutcome, ProverConfig, ProverError, Sequent};
use crate::parser::SourceProgram;

use super::{Checker, Obligation, TypeError, TypingContext};

pub const DEFAULT_CHECK_DEPTH: usize = 10;
pub const PROVER_DEPTH_ENV: &str = "MST_PROVER_DEPTH";

#[derive(Clone, Debug, PartialEq)]
pub struct CheckConfig {
    pub depth: usize,
    pub node_budget: usize,
    pub threads: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
        CheckConfig { depth: DEFAULT_CHECK_DEPTH, node_budget: crate::logic::DEFAULT_NODE_BUDGET, threads }
    }
}

impl CheckConfig {
    /// Defaults, with the depth taken from `MST_PROVER_DEPTH` when set.
    pub fn from_env() -> Self {
        let mut c = CheckConfig::default();
        if let Some(d) = std::env::var(PROVER_DEPTH_ENV).ok().and_then(|v| v.trim().parse().ok()) {
            c.depth = d;
        }
        c
    }

    pub fn with_depth(depth: usize) -> Self {
        CheckConfig { depth, ..CheckConfig::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Proved,
    Unknown,
    /// The prover ran out of its node budget before finishing the depth bound.
    OutOfBudget,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Proved => "Proved",
            Verdict::Unknown => "Unknown",
            Verdict::OutOfBudget => "OutOfBudget",
        }
    }
}

/// The sequent actually handed to the prover: the obligation plus the
/// axioms of the domain primitives it mentions.
fn with_axioms(seq: &Sequent, dom: Option<&StateDomain>) -> Sequent {
    let Some(dom) = dom else { return seq.clone() };
    let prims = primitives_in(seq.left.iter().chain(seq.right.iter()));
    let axioms = dom.axioms_for(prims.iter().map(|s| s.as_str()));
    Sequent::new(seq.ctx.clone(), seq.left.with_all(axioms), seq.right.clone())
}

fn prove_one(ob: &Obligation, dom: Option<&StateDomain>, cfg: &CheckConfig) -> (Verdict, Option<Proof>) {
    let goal = with_axioms(&ob.sequent, dom);
    let mut pc = ProverConfig::with_depth(cfg.depth);
    pc.node_budget = cfg.node_budget;
    if let Some(c) = dom.and_then(|d| d.constants().first()) {
        pc.constants = vec![ValueTerm::Const(c.clone())];
    }
    match sc_prove_with(&goal, &pc) {
        Ok(ProveOutcome::Proved(p)) => (Verdict::Proved, Some(p)),
        Ok(ProveOutcome::Unknown(_)) => (Verdict::Unknown, None),
        Err(ProverError::Budget(_)) => (Verdict::OutOfBudget, None),
    }
}

/// Proves every obligation, in parallel; results are in obligation order.
pub fn discharge(obs: &[Obligation], dom: Option<&StateDomain>, cfg: &CheckConfig) -> Vec<(Verdict, Option<Proof>)> {
    let results: Mutex<Vec<Option<(Verdict, Option<Proof>)>>> = Mutex::new(vec![None; obs.len()]);
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..cfg.threads.clamp(1, obs.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= obs.len() {
                    break;
                }
                let r = prove_one(&obs[i], dom, cfg);
                results.lock().unwrap()[i] = Some(r);
            });
        }
    });
    results.into_inner().unwrap().into_iter().map(|r| r.expect("every obligation is attempted")).collect()
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    /// The type checked against.
    pub ty: CompType,
    /// The syntax-directed type of the computation.
    pub inferred: CompType,
    /// Types of the top-level declarations, in order.
    pub decls: Vec<(Name, ValueType)>,
    pub obligations: Vec<Obligation>,
    pub verdicts: Vec<Verdict>,
    pub proofs: Vec<Option<Proof>>,
}

impl CheckReport {
    pub fn accepted(&self) -> bool {
        self.verdicts.iter().all(|v| *v == Verdict::Proved)
    }

    pub fn out_of_budget(&self) -> bool {
        self.verdicts.contains(&Verdict::OutOfBudget)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for (x, t) in &self.decls {
            let _ = writeln!(out, "let {x} : {t}");
        }
        let _ = writeln!(out, "inferred: {}", self.inferred);
        let _ = writeln!(out, "checked against: {}", self.ty);
        for (i, (ob, v)) in self.obligations.iter().zip(&self.verdicts).enumerate() {
            let _ = writeln!(out, "obligation {} [{}]: {}", i + 1, ob.provenance(), v.as_str());
            let _ = writeln!(out, "    {}", ob.sequent);
        }
        let count = |v: Verdict| self.verdicts.iter().filter(|w| **w == v).count();
        let _ = write!(out, "obligations: {} proved", count(Verdict::Proved));
        for v in [Verdict::Unknown, Verdict::OutOfBudget] {
            if count(v) > 0 {
                let _ = write!(out, ", {} {}", count(v), v.as_str());
            }
        }
        let _ = write!(out, "\nverdict: {}", if self.accepted() { "ACCEPT" } else { "REJECT" });
        out
    }

    /// One line per obligation: `pos TAB rule TAB verdict`.
    pub fn render_machine(&self) -> String {
        let mut out = String::new();
        for (ob, v) in self.obligations.iter().zip(&self.verdicts) {
            let pos = ob.pos.map(|p| p.to_string()).unwrap_or_else(|| "-".into());
            let _ = writeln!(out, "{pos}\t{}\t{}", ob.rule, v.as_str());
        }
        out
    }
}

fn finish(
    ty: CompType,
    inferred: CompType,
    decls: Vec<(Name, ValueType)>,
    obligations: Vec<Obligation>,
    dom: Option<&StateDomain>,
    cfg: &CheckConfig,
) -> CheckReport {
    let (verdicts, proofs) = discharge(&obligations, dom, cfg).into_iter().unzip();
    CheckReport { ty, inferred, decls, obligations, verdicts, proofs }
}

/// `Γ ⊢ e : C` by inference followed by subsumption, with every obligation
/// sent to the prover.
pub fn check_comp(
    ctx: &TypingContext,
    e: &CompTerm,
    c: &CompType,
    dom: Option<&StateDomain>,
    cfg: &CheckConfig,
) -> Result<CheckReport, TypeError> {
    let mut ch = Checker::new(dom);
    ch.wf_comp_type(ctx, c)?;
    let inferred = ch.infer_comp(ctx, e)?;
    ch.sub_comp(ctx, &inferred, c).map_err(|mut err| {
        err.pos = err.pos.or_else(|| first_pos(e));
        err
    })?;
    let mut obligations = ch.take_obligations();
    for ob in &mut obligations {
        ob.pos = ob.pos.or_else(|| first_pos(e));
    }
    Ok(finish(c.clone(), inferred, Vec::new(), obligations, dom, cfg))
}

fn first_pos(e: &CompTerm) -> Option<Pos> {
    match e {
        CompTerm::Located(p, _) => Some(*p),
        _ => None,
    }
}

/// Checks a program and discharges its obligations.
pub fn check_program(prog: &SourceProgram, dom: &StateDomain, cfg: &CheckConfig) -> Result<CheckReport, TypeError> {
    let g = generate_program(prog, dom)?;
    Ok(finish(prog.main.ty.clone(), g.inferred, g.decls, g.obligations, Some(dom), cfg))
}

/// Output of obligation generation, before any proving.
pub struct Generated {
    pub inferred: CompType,
    pub decls: Vec<(Name, ValueType)>,
    pub obligations: Vec<Obligation>,
}

/// Checks declarations in order (each ascription is checked and then used
/// abstractly by later code) and `main` against its type, collecting the
/// proof obligations without discharging them.
pub fn generate_program(prog: &SourceProgram, dom: &StateDomain) -> Result<Generated, TypeError> {
    let mut ch = Checker::new(Some(dom));
    let mut ctx = TypingContext::new();
    let mut decls = Vec::new();
    for d in &prog.decls {
        let at = |mut e: TypeError| {
            e.pos = e.pos.or(Some(d.pos));
            e
        };
        ch.set_pos(Some(d.pos));
        let t = ch.infer_value(&ctx, &d.value).map_err(at)?;
        let t = match &d.ascription {
            Some(a) => {
                ch.wf_type(&ctx, a).map_err(at)?;
                ch.sub_value(&ctx, &t, a).map_err(at)?;
                a.clone()
            }
            None => t,
        };
        ctx.push(d.name.clone(), t.clone());
        decls.push((d.name.clone(), t));
    }
    let main = &prog.main;
    let at = |mut e: TypeError| {
        e.pos = e.pos.or(Some(main.pos));
        e
    };
    ch.set_pos(Some(main.pos));
    ch.wf_comp_type(&ctx, &main.ty).map_err(at)?;
    let inferred = ch.infer_comp(&ctx, &main.body).map_err(at)?;
    ch.sub_comp(&ctx, &inferred, &main.ty).map_err(at)?;
    Ok(Generated { inferred, decls, obligations: ch.take_obligations() })
}

/// `main` with every declaration substituted in: a closed, runnable term.
pub fn link(prog: &SourceProgram) -> CompTerm {
    prog.decls.iter().rev().fold(prog.main.body.clone(), |body, d| body.subst(&d.name, &d.value))
}
