use std::collections::HashSet;

use crate::logic::{SymId, Vocabulary};

/// Ordered set of predicate symbols a hypothesis body may use.
///
/// Protected symbols (the domain primitives) survive every forgetting pass.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    symbols: Vec<SymId>,
    members: HashSet<SymId>,
    protected: Vec<SymId>,
}

impl Signature {
    pub fn new() -> Self {
        Signature::default()
    }

    /// A signature holding exactly `protected`, all of them protected.
    pub fn with_protected(protected: impl IntoIterator<Item = SymId>) -> Self {
        let mut s = Signature::new();
        for p in protected {
            if s.push(p) {
                s.protected.push(p);
            }
        }
        s
    }

    /// Appends `sym` unless present; returns whether it was added.
    pub fn push(&mut self, sym: SymId) -> bool {
        if self.members.insert(sym) {
            self.symbols.push(sym);
            true
        } else {
            false
        }
    }

    pub fn extend(&mut self, syms: impl IntoIterator<Item = SymId>) {
        for s in syms {
            self.push(s);
        }
    }

    pub fn contains(&self, sym: SymId) -> bool {
        self.members.contains(&sym)
    }

    pub fn is_protected(&self, sym: SymId) -> bool {
        self.protected.contains(&sym)
    }

    /// Symbols in insertion order.
    pub fn symbols(&self) -> &[SymId] {
        &self.symbols
    }

    pub fn protected(&self) -> &[SymId] {
        &self.protected
    }

    pub fn forgettable(&self) -> impl Iterator<Item = SymId> + '_ {
        self.symbols.iter().copied().filter(|s| !self.is_protected(*s))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Keeps the protected symbols and those `keep` accepts, preserving order.
    pub fn retain(&self, mut keep: impl FnMut(SymId) -> bool) -> Signature {
        let mut out = Signature { protected: self.protected.clone(), ..Signature::default() };
        for &s in &self.symbols {
            if self.is_protected(s) || keep(s) {
                out.symbols.push(s);
                out.members.insert(s);
            }
        }
        out
    }

    /// The symbols `keep` accepts, protected or not, preserving order and protection.
    pub fn restrict(&self, mut keep: impl FnMut(SymId) -> bool) -> Signature {
        let mut out = Signature::new();
        for &s in &self.symbols {
            if keep(s) {
                out.push(s);
                if self.is_protected(s) {
                    out.protected.push(s);
                }
            }
        }
        out
    }

    pub fn names<'v>(&self, vocab: &'v Vocabulary) -> Vec<&'v str> {
        self.symbols.iter().map(|&s| vocab.name(s)).collect()
    }
}
