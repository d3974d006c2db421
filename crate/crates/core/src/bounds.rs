//! Hypothesis-space and sample-complexity formulas, plus enumeration oracles.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::logic::{Clause, SymId, Vocabulary};
use crate::metarule::MetaruleSet;
use crate::mil::{metagol, Background, LearnOutcome, LearnTask, MilError, SearchConfig};
use crate::signature::Signature;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error("{what} = {value} exceeds the limit {limit}")]
    TooLarge { what: &'static str, value: String, limit: String },
    #[error(transparent)]
    Mil(#[from] MilError),
    #[error("search budget ran out on a subset of size {0}")]
    Undecided(usize),
}

/// (m * p^(j+1))^n
pub fn hspace_size(m: u64, p: u64, j: u32, n: u32) -> BigUint {
    (BigUint::from(m) * BigUint::from(p).pow(j + 1)).pow(n)
}

/// (1/eps) * (n ln m + (j+1) n ln p + ln(1/delta))
pub fn sample_complexity(m: u64, p: u64, j: u32, n: u32, eps: f64, delta: f64) -> f64 {
    let n = f64::from(n);
    (n * (m as f64).ln() + f64::from(j + 1) * n * (p as f64).ln() + (1.0 / delta).ln()) / eps
}

/// r^((j+1) n): the factor by which keeping a fraction r of the symbols shrinks the space.
pub fn reduction_factor(r: f64, j: u32, n: u32) -> f64 {
    r.powf(f64::from(j + 1) * f64::from(n))
}

/// (j+1) n ln r: the change in sample complexity times eps. Never positive for r <= 1.
pub fn sample_reduction(r: f64, j: u32, n: u32) -> f64 {
    f64::from(j + 1) * f64::from(n) * r.ln()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypothesisCount {
    /// Distinct clauses the metarules project to over the signature.
    pub clauses: usize,
    /// Ordered n-tuples of such clauses.
    pub ordered: BigUint,
    /// Distinct clause sets those tuples denote.
    pub distinct: BigUint,
}

/// Every projection of every metarule with all predicate variables, the head
/// included, ranging over `symbols` of matching arity.
pub fn projections(rules: &MetaruleSet, vocab: &Vocabulary, symbols: &[SymId]) -> Vec<Clause> {
    let mut out = Vec::new();
    for rule in rules.iter() {
        let choices: Vec<Vec<SymId>> = rule
            .vars
            .iter()
            .map(|v| symbols.iter().copied().filter(|&s| vocab.arity(s) == v.arity).collect())
            .collect();
        if choices.iter().any(Vec::is_empty) {
            continue;
        }
        let mut pick = vec![0usize; choices.len()];
        'odometer: loop {
            let syms: Vec<SymId> = pick.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
            out.push(rule.instantiate(&syms));
            for d in (0..pick.len()).rev() {
                pick[d] += 1;
                if pick[d] < choices[d].len() {
                    continue 'odometer;
                }
                pick[d] = 0;
            }
            break;
        }
    }
    out
}

/// Counts programs of `n` clauses by walking every ordered tuple. `cap` bounds
/// the number of tuples visited.
pub fn enumerate_hypotheses(
    rules: &MetaruleSet,
    vocab: &Vocabulary,
    symbols: &[SymId],
    n: u32,
    cap: u64,
    mut visit: impl FnMut(&[&Clause]),
) -> Result<HypothesisCount, BoundsError> {
    let clauses = projections(rules, vocab, symbols);
    let c = clauses.len();
    let total = BigUint::from(c).pow(n);
    if total > BigUint::from(cap) {
        return Err(BoundsError::TooLarge { what: "ordered programs", value: total.to_string(), limit: cap.to_string() });
    }
    let n = n as usize;
    let mut ordered = BigUint::zero();
    let mut sets: HashSet<BTreeSet<usize>> = HashSet::new();
    if n == 0 {
        visit(&[]);
        return Ok(HypothesisCount { clauses: c, ordered: BigUint::one(), distinct: BigUint::one() });
    }
    if c == 0 {
        return Ok(HypothesisCount { clauses: 0, ordered, distinct: BigUint::zero() });
    }
    let mut idx = vec![0usize; n];
    'tuples: loop {
        ordered += 1u32;
        sets.insert(idx.iter().copied().collect());
        let program: Vec<&Clause> = idx.iter().map(|&i| &clauses[i]).collect();
        visit(&program);
        for d in (0..n).rev() {
            idx[d] += 1;
            if idx[d] < c {
                continue 'tuples;
            }
            idx[d] = 0;
        }
        break;
    }
    Ok(HypothesisCount { clauses: c, ordered, distinct: BigUint::from(sets.len()) })
}

/// Costs of keeping or forgetting one symbol: (keep relevant, keep irrelevant, forget).
pub fn cost_table(m: u64, p: u64, j: u32, n: u32, k: u32) -> (BigUint, BigUint, BigUint) {
    (hspace_size(m, p + 1, j, n.saturating_sub(k)), hspace_size(m, p + 1, j, n), hspace_size(m, p, j, n))
}

/// Largest signature `minimal_signature` will search subsets of.
pub const MAX_SUBSET_SIGNATURE: usize = 12;

/// A smallest subset of `sig` under which the search still finds a program of
/// the optimal size. `None` when no program up to `cfg.max_size` exists at all.
pub fn minimal_signature(
    env: &Background<'_>,
    sig: &Signature,
    task: &LearnTask,
    cfg: &SearchConfig,
) -> Result<Option<Signature>, BoundsError> {
    if sig.len() > MAX_SUBSET_SIGNATURE {
        return Err(BoundsError::TooLarge {
            what: "signature size",
            value: sig.len().to_string(),
            limit: MAX_SUBSET_SIGNATURE.to_string(),
        });
    }
    let best = match metagol(env, sig, task, cfg)?.outcome {
        LearnOutcome::Solved(p) => p.len(),
        LearnOutcome::NotFound => return Ok(None),
        LearnOutcome::Timeout => return Err(BoundsError::Undecided(sig.len())),
    };
    let fixed = SearchConfig { max_size: best, ..cfg.clone() };
    let symbols = sig.symbols();
    for size in 0..=symbols.len() {
        for subset in combinations(symbols.len(), size) {
            let chosen: Vec<SymId> = subset.iter().map(|&i| symbols[i]).collect();
            let sub = sig.restrict(|s| chosen.contains(&s));
            match metagol(env, &sub, task, &fixed)?.outcome {
                LearnOutcome::Solved(p) if p.len() == best => return Ok(Some(sub)),
                LearnOutcome::Timeout => return Err(BoundsError::Undecided(size)),
                _ => {}
            }
        }
    }
    unreachable!("the full signature solves the task")
}

/// All k-subsets of 0..n in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let Some(d) = (0..k).rev().find(|&d| idx[d] < n - k + d) else { return out };
        idx[d] += 1;
        for e in d + 1..k {
            idx[e] = idx[e - 1] + 1;
        }
    }
}

/// Convenience for printing big counts in scientific form.
pub fn approx(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}
