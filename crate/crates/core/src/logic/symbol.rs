use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Index of a predicate symbol in a [`Vocabulary`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymId(pub(crate) u32);

impl SymId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for SymId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    /// Host-evaluated action or fluent.
    Primitive,
    /// Extensional relation.
    Fact,
    /// Defined by clauses supplied as background knowledge.
    Learned,
    /// Auxiliary predicate introduced during search.
    Invented,
    /// Predicate a task asks to learn.
    Target,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    pub arity: u8,
    pub kind: SymbolKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VocabError {
    #[error("symbol `{name}` already declared as {existing_arity}-ary {existing_kind:?}")]
    Conflict {
        name: String,
        existing_arity: u8,
        existing_kind: SymbolKind,
    },
    #[error("arity of `{0}` must be 1 or 2, got {1}")]
    BadArity(String, u8),
    #[error("unknown symbol `{0}`")]
    Unknown(String),
}

/// Append-only table of predicate symbols. Names are unique and a symbol's
/// arity and kind never change once declared.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocabulary {
    symbols: Vec<Symbol>,
    by_name: HashMap<String, SymId>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a symbol, or returns the existing id when the declaration is identical.
    pub fn declare(&mut self, name: &str, arity: u8, kind: SymbolKind) -> Result<SymId, VocabError> {
        if !(1..=2).contains(&arity) {
            return Err(VocabError::BadArity(name.to_owned(), arity));
        }
        if let Some(&id) = self.by_name.get(name) {
            let existing = &self.symbols[id.index()];
            if existing.arity == arity && existing.kind == kind {
                return Ok(id);
            }
            return Err(VocabError::Conflict {
                name: name.to_owned(),
                existing_arity: existing.arity,
                existing_kind: existing.kind,
            });
        }
        let id = SymId(self.symbols.len() as u32);
        self.symbols.push(Symbol { name: name.to_owned(), arity, kind });
        self.by_name.insert(name.to_owned(), id);
        Ok(id)
    }

    pub fn get(&self, id: SymId) -> &Symbol {
        &self.symbols[id.index()]
    }

    pub fn name(&self, id: SymId) -> &str {
        &self.symbols[id.index()].name
    }

    pub fn arity(&self, id: SymId) -> u8 {
        self.symbols[id.index()].arity
    }

    pub fn kind(&self, id: SymId) -> SymbolKind {
        self.symbols[id.index()].kind
    }

    pub fn lookup(&self, name: &str) -> Option<SymId> {
        self.by_name.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<SymId, VocabError> {
        self.lookup(name).ok_or_else(|| VocabError::Unknown(name.to_owned()))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = SymId> + '_ {
        (0..self.symbols.len() as u32).map(SymId)
    }

    /// Name of the `k`-th invented predicate for `target` (k starts at 1).
    pub fn invented_name(&self, target: SymId, k: usize) -> String {
        format!("{}_{}", self.name(target), k)
    }

    /// Declares invented symbols `<target>_1 ..= <target>_count`, each with the
    /// target's arity.
    pub fn declare_invented(&mut self, target: SymId, count: usize) -> Result<Vec<SymId>, VocabError> {
        let arity = self.arity(target);
        (1..=count)
            .map(|k| {
                let name = self.invented_name(target, k);
                self.declare(&name, arity, SymbolKind::Invented)
            })
            .collect()
    }

    /// Previously declared invented symbols for `target`, in index order.
    pub fn invented_for(&self, target: SymId, count: usize) -> Option<Vec<SymId>> {
        (1..=count)
            .map(|k| {
                self.lookup(&self.invented_name(target, k))
                    .filter(|&id| self.kind(id) == SymbolKind::Invented)
            })
            .collect()
    }
}
