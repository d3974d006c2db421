use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use mil_core::bounds::{approx, cost_table, hspace_size, reduction_factor, sample_complexity, sample_reduction};
use mil_core::corpus::TaskCorpus;
use mil_core::domains::Domain;
use mil_core::harness::{emit_csv, run_corpus, run_experiment, ExperimentConfig, Mode, RunConfig, TimeMean, DEFAULT_STEP_CAP};

#[derive(Parser)]
#[command(name = "mil", version, about = "Meta-interpretive learning with dependent learning and forgetting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded task corpus.
    Gen {
        #[arg(long)]
        domain: Domain,
        #[arg(long)]
        tasks: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Learn every task of a corpus under one strategy.
    Run {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value = "syn")]
        strategy: Mode,
        #[command(flatten)]
        budget: Budget,
        #[arg(long)]
        out: PathBuf,
        /// Also print each learned program.
        #[arg(long)]
        show: bool,
    },
    /// Compare strategies over generated corpora of several sizes.
    Bench {
        #[arg(long)]
        domain: Domain,
        #[arg(long, value_delimiter = ',', default_values_t = [50, 100, 200, 400])]
        counts: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_values = ["none", "syn", "stat", "single"])]
        strategies: Vec<Mode>,
        #[command(flatten)]
        budget: Budget,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print hypothesis-space and sample-complexity figures.
    Bounds {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        j: u32,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long)]
        r: Option<f64>,
        /// Clauses in the definition of a symbol, for the keep/forget costs.
        #[arg(long)]
        k: Option<u32>,
    },
}

#[derive(Args)]
struct Budget {
    /// Seconds per task per depth; 0 disables the wall-clock limit.
    #[arg(long, default_value_t = 5.0)]
    timeout: f64,
    #[arg(long = "max-size", default_value_t = 6)]
    max_size: usize,
    /// Resolution steps per task per depth.
    #[arg(long = "step-cap", default_value_t = DEFAULT_STEP_CAP)]
    step_cap: u64,
    #[arg(long, default_value_t = 1)]
    parallelism: usize,
    /// Average learning time over solved tasks only.
    #[arg(long = "solved-time")]
    solved_time: bool,
}

impl Budget {
    fn config(&self) -> Result<RunConfig> {
        if !(self.timeout >= 0.0 && self.timeout.is_finite()) {
            bail!("--timeout must be a non-negative number of seconds");
        }
        if self.max_size == 0 || self.parallelism == 0 || self.step_cap == 0 {
            bail!("--max-size, --parallelism and --step-cap must be positive");
        }
        Ok(RunConfig {
            timeout: (self.timeout > 0.0).then(|| Duration::from_secs_f64(self.timeout)),
            step_cap: self.step_cap,
            max_d: self.max_size,
            parallelism: self.parallelism,
            time_mean: if self.solved_time { TimeMean::SolvedTasks } else { TimeMean::AllTasks },
        })
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen { domain, tasks, seed, out } => {
            if tasks == 0 {
                bail!("--tasks must be at least 1");
            }
            domain.gen_tasks(tasks, seed).write(&out).with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Run { corpus, strategy, budget, out, show } => {
            let cfg = budget.config()?;
            let tasks = TaskCorpus::read(&corpus).with_context(|| format!("reading {}", corpus.display()))?;
            let summary = run_corpus(&tasks, strategy, &cfg)?;
            if show {
                for (t, p) in tasks.tasks.iter().zip(&summary.programs) {
                    match p {
                        Some(p) => print!("% {}\n{p}", t.name),
                        None => println!("% {}: unsolved", t.name),
                    }
                }
            }
            let row = summary.row(tasks.domain, strategy, 0, cfg.time_mean);
            eprintln!("{}: solved {}/{}", strategy, summary.n_solved(), row.n_tasks);
            emit_csv(&[row], &out).with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Bench { domain, counts, reps, seed, strategies, budget, out } => {
            let cfg = ExperimentConfig { domain, counts, reps, seed, modes: strategies, run: budget.config()? };
            let rows = run_experiment(&cfg, |r| {
                eprintln!("{} n={} rep={} {}: {:.1}% in {:.1}s", r.domain, r.n_tasks, r.rep, r.strategy, r.pct_solved, r.total_wall_s)
            })?;
            emit_csv(&rows, &out).with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Bounds { m, p, j, n, eps, delta, r, k } => {
            if m == 0 || p == 0 {
                bail!("--m and --p must be positive");
            }
            if !(eps > 0.0 && eps < 1.0 && delta > 0.0 && delta < 1.0) {
                bail!("--eps and --delta must lie in (0, 1)");
            }
            let h = hspace_size(m, p, j, n);
            println!("m={m} p={p} j={j} n={n}");
            println!("hypothesis space  {h} (~{:.4e})", approx(&h));
            println!("sample complexity {:.6}", sample_complexity(m, p, j, n, eps, delta));
            if let Some(r) = r {
                if !(r > 0.0 && r <= 1.0) {
                    bail!("--r must lie in (0, 1]");
                }
                println!("reduction factor  {:.6e}", reduction_factor(r, j, n));
                println!("sample change     {:.6}", sample_reduction(r, j, n) / eps);
            }
            if let Some(k) = k {
                let (keep_rel, keep_irr, forget) = cost_table(m, p, j, n, k);
                println!("keep, relevant    {keep_rel}");
                println!("keep, irrelevant  {keep_irr}");
                println!("forget            {forget}");
            }
        }
    }
    Ok(())
}
