//! Metagol-style learning: iterative deepening over program size, with
//! metarule instantiation and predicate invention inside a meta-interpreter.

pub mod brute;
mod search;
mod task;

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::logic::{Atom, Limits, PrimitiveRegistry, Program, ProofOutcome, SymId, Vocabulary};
use crate::metarule::MetaruleSet;
use crate::signature::Signature;

pub use search::Hypothesis;
pub use task::{LearnTask, SearchConfig};

use search::SearchRun;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MilError {
    #[error("a task needs at least one positive example")]
    NoPositives,
    #[error("example does not use the task's target symbol with its arity")]
    ForeignExample,
    #[error("examples must be ground")]
    NonGroundExample,
    #[error("target `{0}` is already in the signature or defined in the background")]
    TargetNotFresh(String),
    #[error("signature symbol `{0}` is the target or one of its invented symbols")]
    SignatureClash(String),
    #[error("invented symbols for `{target}` are not declared (need {needed})")]
    MissingInvented { target: String, needed: usize },
    #[error("max_size must be at least 1")]
    ZeroSize,
}

/// Everything a search reads but never changes.
#[derive(Clone, Copy)]
pub struct Background<'a> {
    pub vocab: &'a Vocabulary,
    pub registry: &'a PrimitiveRegistry,
    pub metarules: &'a MetaruleSet,
    pub bk: &'a Program,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LearnOutcome {
    /// The hypothesis clauses, excluding the background.
    Solved(Program),
    /// No program up to the size bound exists.
    NotFound,
    /// The step cap or the deadline was hit first.
    Timeout,
}

#[derive(Clone, Debug)]
pub struct LearnResult {
    pub outcome: LearnOutcome,
    pub steps: u64,
    pub elapsed: Duration,
}

impl LearnResult {
    pub fn program(&self) -> Option<&Program> {
        match &self.outcome {
            LearnOutcome::Solved(p) => Some(p),
            _ => None,
        }
    }
}

fn prepare<'v>(env: &Background<'v>, sig: &Signature, task: &LearnTask, max_size: usize) -> Result<Vec<SymId>, MilError> {
    if max_size == 0 {
        return Err(MilError::ZeroSize);
    }
    task.check_arity(env.vocab)?;
    let target = task.target;
    if sig.contains(target) || env.bk.defines(target) || env.registry.contains(target) {
        return Err(MilError::TargetNotFresh(env.vocab.name(target).to_owned()));
    }
    let invented = env.vocab.invented_for(target, max_size - 1).ok_or_else(|| MilError::MissingInvented {
        target: env.vocab.name(target).to_owned(),
        needed: max_size - 1,
    })?;
    if let Some(&s) = sig.symbols().iter().find(|s| invented.contains(s)) {
        return Err(MilError::SignatureClash(env.vocab.name(s).to_owned()));
    }
    Ok(invented)
}

/// Learns the smallest program, up to `cfg.max_size` clauses, that proves every
/// positive and no negative example of `task`.
pub fn metagol(env: &Background<'_>, sig: &Signature, task: &LearnTask, cfg: &SearchConfig) -> Result<LearnResult, MilError> {
    let invented = prepare(env, sig, task, cfg.max_size)?;
    let start = Instant::now();
    let limits = Limits {
        max_steps: cfg.step_cap,
        deadline: cfg.timeout.map(|t| start + t),
        max_depth: cfg.max_depth,
        occurs_check: cfg.occurs_check,
    };
    let mut steps = 0;
    for size in 1..=cfg.max_size {
        let run = SearchRun {
            env,
            sig,
            target: task.target,
            invented: &invented[..size - 1],
            max_size: size,
            positives: &task.positives,
            negatives: &task.negatives,
        };
        let mut found = None;
        let (outcome, after) = run.run(limits, steps, &mut |h| {
            found = Some(h.program.clone());
            true
        });
        steps = after;
        let done = |outcome| LearnResult { outcome, steps, elapsed: start.elapsed() };
        match outcome {
            ProofOutcome::Proven => return Ok(done(LearnOutcome::Solved(found.expect("visited")))),
            ProofOutcome::BudgetExhausted => return Ok(done(LearnOutcome::Timeout)),
            ProofOutcome::Refuted => {}
        }
    }
    Ok(LearnResult { outcome: LearnOutcome::NotFound, steps, elapsed: start.elapsed() })
}

/// Enumerates, in search order, hypotheses of at most `max_size` clauses that
/// prove `goals` and none of `negatives`. `visit` returns true to stop.
pub fn meta_prove(
    env: &Background<'_>,
    sig: &Signature,
    target: SymId,
    goals: &[Atom],
    negatives: &[Atom],
    max_size: usize,
    limits: Limits,
    visit: &mut dyn FnMut(&Hypothesis) -> bool,
) -> Result<ProofOutcome, MilError> {
    let task = LearnTask::new(target, goals.to_vec(), negatives.to_vec())?;
    let invented = if max_size == 0 {
        Vec::new()
    } else {
        prepare(env, sig, &task, max_size)?
    };
    let run = SearchRun { env, sig, target, invented: &invented, max_size, positives: goals, negatives };
    Ok(run.run(limits, 0, visit).0)
}
