//! Experiment runner: paired corpora, strategy comparison and CSV rows.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::corpus::{CorpusError, TaskCorpus};
use crate::domains::{Domain, World, WorldError};
use crate::forgetting::ForgetStrategy;
use crate::logic::Program;
use crate::metarule::MetaruleSet;
use crate::mil::SearchConfig;
use crate::multitask::{forgetgol, MultiTaskConfig, MultiTaskError, Setting};

pub const CSV_HEADER: &str =
    "domain,strategy,n_tasks,rep,pct_solved,mean_learn_time_s,total_wall_s,final_bk_clauses,final_sig_size,forgotten_count";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    World(#[from] WorldError),
    #[error(transparent)]
    MultiTask(#[from] MultiTaskError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// A forgetting strategy, or learning every task on its own.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Multi(ForgetStrategy),
    Single,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Multi(s) => s.fmt(f),
            Mode::Single => f.write_str("single"),
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "single" {
            Ok(Mode::Single)
        } else {
            s.parse().map(Mode::Multi).map_err(|_| format!("unknown strategy `{s}` (expected none, syn, stat or single)"))
        }
    }
}

/// Which tasks the mean learning time averages over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeMean {
    AllTasks,
    SolvedTasks,
}

/// Budget and shape of one learning run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    /// Wall-clock limit per task per depth.
    pub timeout: Option<Duration>,
    /// Resolution-step limit per task per depth.
    pub step_cap: u64,
    pub max_d: usize,
    pub parallelism: usize,
    pub time_mean: TimeMean,
}

pub const DEFAULT_STEP_CAP: u64 = 2_000_000;

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            timeout: Some(Duration::from_secs(5)),
            step_cap: DEFAULT_STEP_CAP,
            max_d: 6,
            parallelism: 1,
            time_mean: TimeMean::AllTasks,
        }
    }
}

impl RunConfig {
    fn multitask(&self, strategy: ForgetStrategy) -> MultiTaskConfig {
        MultiTaskConfig {
            max_d: self.max_d,
            strategy,
            search: SearchConfig { timeout: self.timeout, step_cap: self.step_cap, ..SearchConfig::default() },
            parallelism: self.parallelism,
            cost_n: self.max_d,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub domain: Domain,
    pub counts: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub modes: Vec<Mode>,
    pub run: RunConfig,
}

impl ExperimentConfig {
    pub fn desk(domain: Domain, seed: u64) -> Self {
        ExperimentConfig {
            domain,
            counts: vec![50, 100, 200, 400],
            reps: 3,
            seed,
            modes: vec![
                Mode::Multi(ForgetStrategy::None),
                Mode::Multi(ForgetStrategy::Syntactical),
                Mode::Multi(ForgetStrategy::Statistical),
                Mode::Single,
            ],
            run: RunConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Config(m.to_owned()));
        if self.reps == 0 {
            return bad("repetitions must be at least 1");
        }
        if self.counts.is_empty() || self.counts.contains(&0) {
            return bad("task counts must be positive");
        }
        if self.counts.windows(2).any(|w| w[0] >= w[1]) {
            return bad("task counts must be strictly ascending");
        }
        if self.modes.is_empty() {
            return bad("at least one strategy is needed");
        }
        if self.run.max_d == 0 || self.run.parallelism == 0 {
            return bad("max size and parallelism must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub domain: String,
    pub strategy: String,
    pub n_tasks: usize,
    pub rep: usize,
    pub pct_solved: f64,
    pub mean_learn_time_s: f64,
    pub total_wall_s: f64,
    pub final_bk_clauses: usize,
    pub final_sig_size: usize,
    pub forgotten_count: usize,
}

/// Outcome of learning one corpus under one mode.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub solved: Vec<bool>,
    pub learn_times: Vec<Duration>,
    pub wall: Duration,
    pub final_bk_clauses: usize,
    pub final_sig_size: usize,
    pub forgotten_count: usize,
    /// Learned programs per task, rendered as text.
    pub programs: Vec<Option<String>>,
}

impl RunSummary {
    pub fn n_solved(&self) -> usize {
        self.solved.iter().filter(|&&s| s).count()
    }

    pub fn row(&self, domain: Domain, mode: Mode, rep: usize, time_mean: TimeMean) -> ResultRow {
        let n = self.solved.len();
        let times: Vec<f64> = match time_mean {
            TimeMean::AllTasks => self.learn_times.iter().map(Duration::as_secs_f64).collect(),
            TimeMean::SolvedTasks => {
                self.learn_times.iter().zip(&self.solved).filter(|(_, &s)| s).map(|(t, _)| t.as_secs_f64()).collect()
            }
        };
        let mean = if times.is_empty() { 0.0 } else { times.iter().sum::<f64>() / times.len() as f64 };
        ResultRow {
            domain: domain.to_string(),
            strategy: mode.to_string(),
            n_tasks: n,
            rep,
            pct_solved: if n == 0 { 0.0 } else { round(100.0 * self.n_solved() as f64 / n as f64, 4) },
            mean_learn_time_s: round(mean, 6),
            total_wall_s: round(self.wall.as_secs_f64(), 6),
            final_bk_clauses: self.final_bk_clauses,
            final_sig_size: self.final_sig_size,
            forgotten_count: self.forgotten_count,
        }
    }
}

fn round(x: f64, places: i32) -> f64 {
    let f = 10f64.powi(places);
    (x * f).round() / f
}

/// Learns every task of `corpus` under `mode`.
pub fn run_corpus(corpus: &TaskCorpus, mode: Mode, cfg: &RunConfig) -> Result<RunSummary, HarnessError> {
    let start = Instant::now();
    let mut world = World::new(corpus.domain);
    let tasks = world.declare_tasks(corpus, cfg.max_d.saturating_sub(1))?;
    let metarules = MetaruleSet::standard();
    let setting = Setting { vocab: &world.vocab, registry: &world.registry, metarules: &metarules };
    let n = tasks.len();
    match mode {
        Mode::Multi(strategy) => {
            let r = forgetgol(setting, Program::new(), world.signature(), &tasks, &cfg.multitask(strategy))?;
            let mut solved = vec![false; n];
            let mut programs = vec![None; n];
            for (i, p) in &r.programs {
                solved[*i] = true;
                programs[*i] = Some(p.display(&world.vocab).to_string());
            }
            Ok(RunSummary {
                solved,
                learn_times: r.learn_times(n),
                wall: start.elapsed(),
                final_bk_clauses: r.bk.len(),
                final_sig_size: r.final_sig.len(),
                forgotten_count: r.sig.len() - r.final_sig.len(),
                programs,
            })
        }
        Mode::Single => {
            let one = MultiTaskConfig { parallelism: 1, ..cfg.multitask(ForgetStrategy::None) };
            let solve = |t| forgetgol(setting, Program::new(), world.signature(), std::slice::from_ref(t), &one);
            let results: Vec<_> = if cfg.parallelism > 1 {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(cfg.parallelism)
                    .build()
                    .map_err(|e| HarnessError::Config(e.to_string()))?;
                pool.install(|| tasks.par_iter().map(solve).collect())
            } else {
                tasks.iter().map(solve).collect()
            };
            let mut summary = RunSummary {
                solved: Vec::with_capacity(n),
                learn_times: Vec::with_capacity(n),
                wall: Duration::ZERO,
                final_bk_clauses: 0,
                final_sig_size: world.primitives.len(),
                forgotten_count: 0,
                programs: Vec::with_capacity(n),
            };
            for r in results {
                let r = r?;
                summary.solved.push(r.solved() == 1);
                summary.learn_times.push(r.learn_times(1)[0]);
                summary.final_bk_clauses += r.bk.len();
                summary.programs.push(r.programs.first().map(|(_, p)| p.display(&world.vocab).to_string()));
            }
            summary.wall = start.elapsed();
            Ok(summary)
        }
    }
}

/// SplitMix64 finalizer over the experiment seed, task count and repetition.
pub fn corpus_seed(seed: u64, n_tasks: usize, rep: usize) -> u64 {
    let mut z = seed;
    for v in [n_tasks as u64, rep as u64] {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(v);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
    }
    z
}

/// Every (task count, repetition, mode) cell; all modes share each corpus.
pub fn run_experiment(cfg: &ExperimentConfig, mut progress: impl FnMut(&ResultRow)) -> Result<Vec<ResultRow>, HarnessError> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for &n in &cfg.counts {
        for rep in 0..cfg.reps {
            let corpus = cfg.domain.gen_tasks(n, corpus_seed(cfg.seed, n, rep));
            for &mode in &cfg.modes {
                let row = run_corpus(&corpus, mode, &cfg.run)?.row(cfg.domain, mode, rep, cfg.run.time_mean);
                progress(&row);
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

pub fn write_csv(rows: &[ResultRow], out: impl Write) -> Result<(), HarnessError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(rows: &[ResultRow], path: &Path) -> Result<(), HarnessError> {
    write_csv(rows, std::fs::File::create(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_only_for_no_rows() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn seeds_differ_per_cell() {
        let a = corpus_seed(1, 50, 0);
        assert_eq!(a, corpus_seed(1, 50, 0));
        assert_ne!(a, corpus_seed(1, 50, 1));
        assert_ne!(a, corpus_seed(1, 100, 0));
        assert_ne!(a, corpus_seed(2, 50, 0));
    }

    #[test]
    fn modes_parse() {
        assert_eq!("single".parse::<Mode>().unwrap(), Mode::Single);
        assert_eq!("syn".parse::<Mode>().unwrap(), Mode::Multi(ForgetStrategy::Syntactical));
        assert!("all".parse::<Mode>().is_err());
        let mut c = ExperimentConfig::desk(Domain::Robot, 0);
        assert!(c.validate().is_ok());
        c.counts = vec![100, 50];
        assert!(c.validate().is_err());
    }
}
