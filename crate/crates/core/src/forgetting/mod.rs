//! Shrinking the signature: remember everything, drop syntactic duplicates,
//! or drop symbols whose expected search cost says they do not pay their way.

mod unfold;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::logic::{Clause, Program, SymId, Term, Vocabulary};
use crate::signature::Signature;

pub use unfold::{unfold, unfold_program, UnfoldError, MAX_UNFOLDED};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ForgetStrategy {
    /// Keep every symbol.
    None,
    Syntactical,
    Statistical,
}

impl fmt::Display for ForgetStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ForgetStrategy::None => "none",
            ForgetStrategy::Syntactical => "syn",
            ForgetStrategy::Statistical => "stat",
        })
    }
}

impl FromStr for ForgetStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(ForgetStrategy::None),
            "syn" | "syntactical" => Ok(ForgetStrategy::Syntactical),
            "stat" | "statistical" => Ok(ForgetStrategy::Statistical),
            _ => Err(format!("unknown forgetting strategy `{s}` (expected none, syn or stat)")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ForgetError {
    #[error(transparent)]
    Unfold(#[from] UnfoldError),
    #[error("a definition of {k} clauses exceeds the program size {n}")]
    ClausesExceedSize { k: usize, n: usize },
    #[error("cost parameters m, j, n and p must be positive")]
    NonPositive,
    #[error("relevance probability must lie in (0, 1]")]
    BadProbability,
}

/// Body predicate of a canonical clause; recursion is recorded without naming the head.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum BodyPred {
    Sym(SymId),
    Head,
}

/// A clause up to renaming of its head symbol and variables. Body order is kept.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonicalClause {
    head_args: Vec<Term>,
    body: Vec<(BodyPred, Vec<Term>)>,
}

pub fn canonical(c: &Clause) -> CanonicalClause {
    let n = c.normalized();
    let head = n.head.pred;
    CanonicalClause {
        body: n
            .body
            .into_iter()
            .map(|a| (if a.pred == head { BodyPred::Head } else { BodyPred::Sym(a.pred) }, a.args))
            .collect(),
        head_args: n.head.args,
    }
}

/// Keeps a symbol when one of its unfolded clauses is new with respect to the
/// unfolded clauses kept so far, scanning `b` in order.
pub fn forget_syntactical(sig: &Signature, b: &Program, vocab: &Vocabulary) -> Result<Signature, ForgetError> {
    let mut seen: HashSet<CanonicalClause> = HashSet::new();
    let mut keep: HashSet<SymId> = HashSet::new();
    for c in b.clauses() {
        let h = c.head.pred;
        if !sig.contains(h) || sig.is_protected(h) {
            continue;
        }
        for u in unfold(c, b, vocab)? {
            if seen.insert(canonical(&u)) {
                keep.insert(h);
            }
        }
    }
    Ok(sig.retain(|s| keep.contains(&s)))
}

/// (clauses of `b` with `s` in the body + 1) / (|b| + 1).
pub fn pr_relevant(s: SymId, b: &Program) -> BigRational {
    let uses = b.clauses().iter().filter(|c| c.body.iter().any(|a| a.pred == s)).count();
    BigRational::new(BigInt::from(uses + 1), BigInt::from(b.len() + 1))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostParams {
    pub m: u64,
    pub j: u32,
    pub n: u32,
    pub p: u64,
    pub k: u32,
    pub pr: BigRational,
}

/// (m * p^(j+1))^n
fn space(m: u64, p: u64, j: u32, n: u32) -> BigUint {
    (BigUint::from(m) * BigUint::from(p).pow(j + 1)).pow(n)
}

/// Expected search cost of keeping the symbol and the cost of forgetting it.
pub fn expected_costs(cp: &CostParams) -> Result<(BigRational, BigUint), ForgetError> {
    if cp.m == 0 || cp.n == 0 || cp.p == 0 {
        return Err(ForgetError::NonPositive);
    }
    if cp.k > cp.n {
        return Err(ForgetError::ClausesExceedSize { k: cp.k as usize, n: cp.n as usize });
    }
    if cp.pr <= BigRational::zero() || cp.pr > BigRational::one() {
        return Err(ForgetError::BadProbability);
    }
    let rat = |u: BigUint| BigRational::from_integer(BigInt::from(u));
    let relevant = rat(space(cp.m, cp.p + 1, cp.j, cp.n - cp.k));
    let irrelevant = rat(space(cp.m, cp.p + 1, cp.j, cp.n));
    let keep = &cp.pr * relevant + (BigRational::one() - &cp.pr) * irrelevant;
    Ok((keep, space(cp.m, cp.p, cp.j, cp.n)))
}

/// Keep-condition of the statistical strategy: forgetting would cost more.
pub fn should_keep(cp: &CostParams) -> Result<bool, ForgetError> {
    let (keep, forget) = expected_costs(cp)?;
    Ok(BigRational::from_integer(BigInt::from(forget)) > keep)
}

/// Keeps each learned symbol whose forget cost exceeds its expected keep cost,
/// with p = |sig|, `n` the target program size and k its clause count.
pub fn forget_statistical(sig: &Signature, b: &Program, m: usize, j: usize, n: usize) -> Result<Signature, ForgetError> {
    let mut clause_counts: HashMap<SymId, usize> = HashMap::new();
    for c in b.clauses() {
        *clause_counts.entry(c.head.pred).or_default() += 1;
    }
    let p = sig.len() as u64;
    let mut keep = HashSet::new();
    for h in b.heads() {
        if !sig.contains(h) || sig.is_protected(h) {
            continue;
        }
        let cp = CostParams { m: m as u64, j: j as u32, n: n as u32, p, k: clause_counts[&h] as u32, pr: pr_relevant(h, b) };
        if should_keep(&cp)? {
            keep.insert(h);
        }
    }
    Ok(sig.retain(|s| keep.contains(&s)))
}

/// Parameters the statistical strategy takes from the search setup.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CostBase {
    pub m: usize,
    pub j: usize,
    pub n: usize,
}

pub fn forget(
    strategy: ForgetStrategy,
    sig: &Signature,
    b: &Program,
    vocab: &Vocabulary,
    base: CostBase,
) -> Result<Signature, ForgetError> {
    match strategy {
        ForgetStrategy::None => Ok(sig.clone()),
        ForgetStrategy::Syntactical => forget_syntactical(sig, b, vocab),
        ForgetStrategy::Statistical => forget_statistical(sig, b, base.m, base.j, base.n),
    }
}
