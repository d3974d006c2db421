//! Exhaustive search over explicit programs, used as an oracle for the meta-interpreter.

use thiserror::Error;

use crate::logic::{prove, Clause, Limits, Program, ProofOutcome, SymId};

use super::{Background, LearnTask};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{programs} candidate programs exceed the cap of {cap}")]
pub struct TooMany {
    pub programs: u128,
    pub cap: u128,
}

/// Every projection of every metarule with head in `heads` and other
/// predicate variables over `body`, in metarule then symbol order.
pub fn candidate_clauses(env: &Background<'_>, heads: &[SymId], body: &[SymId]) -> Vec<Clause> {
    let mut out = Vec::new();
    for &h in heads {
        for rule in env.metarules.iter() {
            if rule.head_arity() != env.vocab.arity(h) {
                continue;
            }
            let choices: Vec<Vec<SymId>> = rule
                .vars
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    if i == rule.head.var {
                        vec![h]
                    } else {
                        body.iter().copied().filter(|&s| env.vocab.arity(s) == v.arity).collect()
                    }
                })
                .collect();
            let mut pick = vec![0usize; choices.len()];
            if choices.iter().any(Vec::is_empty) {
                continue;
            }
            loop {
                let syms: Vec<SymId> = pick.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
                out.push(rule.instantiate(&syms));
                let mut d = pick.len();
                loop {
                    if d == 0 {
                        break;
                    }
                    d -= 1;
                    pick[d] += 1;
                    if pick[d] < choices[d].len() {
                        break;
                    }
                    pick[d] = 0;
                }
                if pick.iter().all(|&i| i == 0) {
                    break;
                }
            }
        }
    }
    out
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Does `program` (on top of the background) prove every positive and no negative?
pub fn covers(env: &Background<'_>, program: &Program, task: &LearnTask, limits: Limits) -> bool {
    let mut full = env.bk.clone();
    full.extend(program.clauses().iter().cloned());
    covers_with(env, &full, task, limits)
}

fn covers_with(env: &Background<'_>, full: &Program, task: &LearnTask, limits: Limits) -> bool {
    let check = |a| prove(std::slice::from_ref(a), full, env.registry, env.vocab, limits).outcome;
    task.positives.iter().all(|p| check(p) == ProofOutcome::Proven)
        && task.negatives.iter().all(|n| check(n) == ProofOutcome::Refuted)
}

/// First set of exactly `size` distinct clauses (target among the heads,
/// `size - 1` invented symbols available) that covers `task`, searching
/// clause combinations in lexicographic order.
pub fn brute_force(
    env: &Background<'_>,
    sig: &[SymId],
    invented: &[SymId],
    task: &LearnTask,
    size: usize,
    limits: Limits,
    cap: u128,
) -> Result<Option<Program>, TooMany> {
    if size == 0 {
        return Ok(None);
    }
    let inv = &invented[..invented.len().min(size - 1)];
    let heads: Vec<SymId> = std::iter::once(task.target).chain(inv.iter().copied()).collect();
    let body: Vec<SymId> = sig.iter().copied().chain(heads.iter().copied()).collect();
    let cands = candidate_clauses(env, &heads, &body);
    let programs = binomial(cands.len() as u128, size as u128);
    if programs > cap {
        return Err(TooMany { programs, cap });
    }
    let mut full = env.bk.clone();
    let base = full.len();
    let mut idx: Vec<usize> = (0..size).collect();
    if cands.len() < size {
        return Ok(None);
    }
    loop {
        if idx.iter().any(|&i| cands[i].head.pred == task.target) {
            full.truncate(base);
            full.extend(idx.iter().map(|&i| cands[i].clone()));
            if covers_with(env, &full, task, limits) {
                return Ok(Some(Program::from_clauses(idx.iter().map(|&i| cands[i].clone()))));
            }
        }
        let mut d = size;
        loop {
            if d == 0 {
                return Ok(None);
            }
            d -= 1;
            if idx[d] < cands.len() - (size - d) {
                break;
            }
        }
        idx[d] += 1;
        for e in d + 1..size {
            idx[e] = idx[e - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::binomial;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(56, 1), 56);
        assert_eq!(binomial(3, 4), 0);
    }
}
