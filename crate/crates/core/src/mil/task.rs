use std::time::Duration;

use crate::logic::{Atom, SymId, Vocabulary};

use super::MilError;

/// Examples for one target predicate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LearnTask {
    pub target: SymId,
    pub positives: Vec<Atom>,
    pub negatives: Vec<Atom>,
}

impl LearnTask {
    pub fn new(target: SymId, positives: Vec<Atom>, negatives: Vec<Atom>) -> Result<Self, MilError> {
        if positives.is_empty() {
            return Err(MilError::NoPositives);
        }
        for e in positives.iter().chain(&negatives) {
            if e.pred != target {
                return Err(MilError::ForeignExample);
            }
            if !e.is_ground() {
                return Err(MilError::NonGroundExample);
            }
        }
        Ok(LearnTask { target, positives, negatives })
    }

    pub fn one_shot(example: Atom) -> Result<Self, MilError> {
        Self::new(example.pred, vec![example], Vec::new())
    }

    pub fn check_arity(&self, vocab: &Vocabulary) -> Result<(), MilError> {
        let arity = vocab.arity(self.target) as usize;
        if self.positives.iter().chain(&self.negatives).any(|e| e.args.len() != arity) {
            return Err(MilError::ForeignExample);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Largest program, in clauses, that iterative deepening tries.
    pub max_size: usize,
    /// Wall-clock budget for the whole call.
    pub timeout: Option<Duration>,
    /// Resolution-step budget for the whole call.
    pub step_cap: u64,
    pub occurs_check: bool,
    pub max_depth: u32,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { max_size: 6, timeout: None, step_cap: 2_000_000, occurs_check: true, max_depth: 512 }
    }
}

impl SearchConfig {
    pub fn with_max_size(max_size: usize) -> Self {
        SearchConfig { max_size, ..SearchConfig::default() }
    }
}
