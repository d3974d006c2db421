//! Dependent learning over a task set: attempt every open task with programs
//! of at most `depth` clauses, add what was learned to the background and the
//! signature, and move on to the next depth.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::forgetting::{forget, CostBase, ForgetError, ForgetStrategy};
use crate::logic::{PrimitiveRegistry, Program, SymId, Vocabulary};
use crate::metarule::MetaruleSet;
use crate::mil::{metagol, Background, LearnOutcome, LearnTask, MilError, SearchConfig};
use crate::signature::Signature;

#[derive(Debug, Error)]
pub enum MultiTaskError {
    #[error("task `{0}`: {1}")]
    Task(String, MilError),
    #[error(transparent)]
    Forget(#[from] ForgetError),
    #[error("max_d must be at least 1")]
    ZeroDepth,
    #[error("thread pool: {0}")]
    Pool(String),
}

#[derive(Clone, Debug)]
pub struct MultiTaskConfig {
    pub max_d: usize,
    pub strategy: ForgetStrategy,
    /// Per-call search budget; `max_size` is replaced by the depth.
    pub search: SearchConfig,
    pub parallelism: usize,
    /// Program size assumed by the statistical strategy's costs.
    pub cost_n: usize,
}

impl Default for MultiTaskConfig {
    fn default() -> Self {
        MultiTaskConfig {
            max_d: 6,
            strategy: ForgetStrategy::None,
            search: SearchConfig::default(),
            parallelism: 1,
            cost_n: 6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AttemptStatus {
    Solved,
    NotFound,
    Timeout,
}

#[derive(Clone, Debug)]
pub struct Attempt {
    pub task: usize,
    pub status: AttemptStatus,
    pub time: Duration,
    pub steps: u64,
}

#[derive(Clone, Debug)]
pub struct DepthReport {
    pub depth: usize,
    /// Task indices solved at this depth, in task order.
    pub solved: Vec<usize>,
    pub attempts: Vec<Attempt>,
    pub bk_before: usize,
    pub bk_after: usize,
    pub sig_before: usize,
    /// Size of the signature the searches used, after forgetting.
    pub sig_searched: usize,
    pub sig_after: usize,
    pub forgotten: Vec<String>,
}

/// Result of one depth: new symbols, solved tasks and their programs.
#[derive(Clone, Debug, Default)]
pub struct DepthLearned {
    pub symbols: Vec<SymId>,
    pub solved: Vec<usize>,
    pub programs: Vec<(usize, Program)>,
    pub attempts: Vec<Attempt>,
}

#[derive(Clone, Debug)]
pub struct ForgetgolResult {
    /// Learned programs as (task index, program), in the order they were added.
    pub programs: Vec<(usize, Program)>,
    pub reports: Vec<DepthReport>,
    pub bk: Program,
    pub sig: Signature,
    /// The signature a further depth would search, i.e. `sig` after forgetting.
    pub final_sig: Signature,
}

impl ForgetgolResult {
    pub fn solved(&self) -> usize {
        self.programs.len()
    }

    /// Total learning time per task index over all depths.
    pub fn learn_times(&self, n_tasks: usize) -> Vec<Duration> {
        let mut t = vec![Duration::ZERO; n_tasks];
        for r in &self.reports {
            for a in &r.attempts {
                t[a.task] += a.time;
            }
        }
        t
    }
}

/// Read-only inputs shared by every depth.
#[derive(Clone, Copy)]
pub struct Setting<'a> {
    pub vocab: &'a Vocabulary,
    pub registry: &'a PrimitiveRegistry,
    pub metarules: &'a MetaruleSet,
}

fn attempt(env: &Background<'_>, sig: &Signature, task: &LearnTask, cfg: &SearchConfig) -> Result<(Attempt, Option<Program>), MilError> {
    let start = Instant::now();
    let r = metagol(env, sig, task, cfg)?;
    let (status, program) = match r.outcome {
        LearnOutcome::Solved(p) => (AttemptStatus::Solved, Some(p)),
        LearnOutcome::NotFound => (AttemptStatus::NotFound, None),
        LearnOutcome::Timeout => (AttemptStatus::Timeout, None),
    };
    Ok((Attempt { task: 0, status, time: start.elapsed(), steps: r.steps }, program))
}

/// Attempts `open` tasks with at most `depth` clauses against a fixed background
/// and signature. Results are in `open` order however the work is scheduled.
pub fn learn_depth(
    setting: Setting<'_>,
    bk: &Program,
    sig: &Signature,
    tasks: &[LearnTask],
    open: &[usize],
    depth: usize,
    search: &SearchConfig,
    pool: Option<&rayon::ThreadPool>,
) -> Result<DepthLearned, MultiTaskError> {
    let env = Background { vocab: setting.vocab, registry: setting.registry, metarules: setting.metarules, bk };
    let cfg = SearchConfig { max_size: depth, ..search.clone() };
    let run = |&i: &usize| {
        attempt(&env, sig, &tasks[i], &cfg)
            .map(|(a, p)| (Attempt { task: i, ..a }, p))
            .map_err(|e| MultiTaskError::Task(setting.vocab.name(tasks[i].target).to_owned(), e))
    };
    let results: Vec<_> = match pool {
        Some(pool) => pool.install(|| open.par_iter().map(run).collect()),
        None => open.iter().map(run).collect(),
    };
    let mut out = DepthLearned::default();
    for r in results {
        let (a, program) = r?;
        if let Some(p) = program {
            for h in p.heads() {
                if !out.symbols.contains(&h) {
                    out.symbols.push(h);
                }
            }
            out.solved.push(a.task);
            out.programs.push((a.task, p));
        }
        out.attempts.push(a);
    }
    Ok(out)
}

/// Depth-staged dependent learning with per-depth forgetting.
pub fn forgetgol(
    setting: Setting<'_>,
    bk: Program,
    sig: Signature,
    tasks: &[LearnTask],
    cfg: &MultiTaskConfig,
) -> Result<ForgetgolResult, MultiTaskError> {
    if cfg.max_d == 0 {
        return Err(MultiTaskError::ZeroDepth);
    }
    let pool = if cfg.parallelism > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.parallelism)
                .build()
                .map_err(|e| MultiTaskError::Pool(e.to_string()))?,
        )
    } else {
        None
    };
    let base = CostBase { m: setting.metarules.m(), j: setting.metarules.j(), n: cfg.cost_n };
    let mut bk = bk;
    let mut sig = sig;
    let mut open: Vec<usize> = (0..tasks.len()).collect();
    let mut programs = Vec::new();
    let mut reports = Vec::new();
    for depth in 1..=cfg.max_d {
        let searched = forget(cfg.strategy, &sig, &bk, setting.vocab, base)?;
        let forgotten = sig.symbols().iter().filter(|s| !searched.contains(**s)).map(|&s| setting.vocab.name(s).to_owned()).collect();
        let (bk_before, sig_before) = (bk.len(), sig.len());
        let learned = if open.is_empty() {
            DepthLearned::default()
        } else {
            learn_depth(setting, &bk, &searched, tasks, &open, depth, &cfg.search, pool.as_ref())?
        };
        for (_, p) in &learned.programs {
            bk.extend(p.clauses().iter().cloned());
        }
        sig.extend(learned.symbols.iter().copied());
        open.retain(|i| !learned.solved.contains(i));
        reports.push(DepthReport {
            depth,
            solved: learned.solved,
            attempts: learned.attempts,
            bk_before,
            bk_after: bk.len(),
            sig_before,
            sig_searched: searched.len(),
            sig_after: sig.len(),
            forgotten,
        });
        programs.extend(learned.programs);
    }
    let final_sig = forget(cfg.strategy, &sig, &bk, setting.vocab, base)?;
    Ok(ForgetgolResult { programs, reports, bk, sig, final_sig })
}
