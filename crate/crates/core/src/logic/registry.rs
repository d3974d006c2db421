use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::symbol::SymId;
use super::term::Term;

pub type TransitionFn = Arc<dyn Fn(&Term) -> Option<Term> + Send + Sync>;
pub type FluentFn = Arc<dyn Fn(&Term) -> bool + Send + Sync>;

/// How the host evaluates a primitive relation.
#[derive(Clone)]
pub enum Evaluator {
    /// Deterministic partial function from a ground state to its successor.
    Transition(TransitionFn),
    /// Test on a ground state.
    Fluent(FluentFn),
    /// Extensional relation, tried in table order.
    Facts(Vec<Vec<Term>>),
}

impl fmt::Debug for Evaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Evaluator::Transition(_) => f.write_str("Transition(..)"),
            Evaluator::Fluent(_) => f.write_str("Fluent(..)"),
            Evaluator::Facts(rows) => write!(f, "Facts({} rows)", rows.len()),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct PrimitiveRegistry {
    evaluators: HashMap<SymId, Evaluator>,
}

impl PrimitiveRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, sym: SymId, eval: Evaluator) {
        self.evaluators.insert(sym, eval);
    }

    pub fn transition(&mut self, sym: SymId, f: impl Fn(&Term) -> Option<Term> + Send + Sync + 'static) {
        self.insert(sym, Evaluator::Transition(Arc::new(f)));
    }

    pub fn fluent(&mut self, sym: SymId, f: impl Fn(&Term) -> bool + Send + Sync + 'static) {
        self.insert(sym, Evaluator::Fluent(Arc::new(f)));
    }

    /// Appends ground rows to an extensional table, creating it if needed.
    pub fn add_facts(&mut self, sym: SymId, rows: impl IntoIterator<Item = Vec<Term>>) {
        match self.evaluators.entry(sym).or_insert_with(|| Evaluator::Facts(Vec::new())) {
            Evaluator::Facts(table) => table.extend(rows),
            _ => panic!("symbol {sym:?} already has a non-extensional evaluator"),
        }
    }

    pub fn get(&self, sym: SymId) -> Option<&Evaluator> {
        self.evaluators.get(&sym)
    }

    pub fn contains(&self, sym: SymId) -> bool {
        self.evaluators.contains_key(&sym)
    }

    pub fn symbols(&self) -> impl Iterator<Item = SymId> + '_ {
        self.evaluators.keys().copied()
    }
}
