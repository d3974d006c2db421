use std::collections::HashMap;
use std::fmt;

use super::symbol::{SymId, Vocabulary};
use super::term::{Term, VarId};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Atom {
    pub pred: SymId,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: SymId, args: Vec<Term>) -> Self {
        Atom { pred, args }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn max_var(&self) -> Option<VarId> {
        self.args.iter().filter_map(Term::max_var).max()
    }

    pub fn display<'a>(&'a self, vocab: &'a Vocabulary) -> impl fmt::Display + 'a {
        AtomDisplay { atom: self, vocab }
    }

    pub fn rename(&self, map: &dyn Fn(VarId) -> VarId) -> Atom {
        Atom { pred: self.pred, args: self.args.iter().map(|t| t.rename(map)).collect() }
    }
}

struct AtomDisplay<'a> {
    atom: &'a Atom,
    vocab: &'a Vocabulary,
}

impl fmt::Display for AtomDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.vocab.name(self.atom.pred))?;
        f.write_str("(")?;
        for (i, a) in self.atom.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

/// A definite clause. Facts have an empty body.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Clause {
    pub head: Atom,
    pub body: Vec<Atom>,
}

impl Clause {
    pub fn new(head: Atom, body: Vec<Atom>) -> Self {
        Clause { head, body }
    }

    pub fn fact(head: Atom) -> Self {
        Clause { head, body: Vec::new() }
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        std::iter::once(&self.head).chain(self.body.iter())
    }

    /// One more than the largest variable id, i.e. how many ids a renaming must reserve.
    pub fn var_span(&self) -> u32 {
        self.atoms().filter_map(Atom::max_var).max().map_or(0, |v| v + 1)
    }

    /// Renumbers variables in first-occurrence order (head, then body left to right).
    pub fn normalized(&self) -> Clause {
        let mut order = Vec::new();
        for atom in self.atoms() {
            for t in &atom.args {
                t.vars_in_order(&mut order);
            }
        }
        let map = |v: VarId| order.iter().position(|&o| o == v).unwrap() as VarId;
        Clause {
            head: self.head.rename(&map),
            body: self.body.iter().map(|a| a.rename(&map)).collect(),
        }
    }

    pub fn display<'a>(&'a self, vocab: &'a Vocabulary) -> impl fmt::Display + 'a {
        ClauseDisplay { clause: self, vocab }
    }
}

struct ClauseDisplay<'a> {
    clause: &'a Clause,
    vocab: &'a Vocabulary,
}

impl fmt::Display for ClauseDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.clause.head.display(self.vocab))?;
        if !self.clause.body.is_empty() {
            f.write_str(" :- ")?;
            for (i, b) in self.clause.body.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", b.display(self.vocab))?;
            }
        }
        f.write_str(".")
    }
}

/// Ordered clause store with a per-predicate index. Its size is the number of clauses.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    clauses: Vec<Clause>,
    index: HashMap<SymId, Vec<usize>>,
}

impl Program {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_clauses(clauses: impl IntoIterator<Item = Clause>) -> Self {
        let mut p = Program::new();
        p.extend(clauses);
        p
    }

    pub fn push(&mut self, clause: Clause) {
        self.index.entry(clause.head.pred).or_default().push(self.clauses.len());
        self.clauses.push(clause);
    }

    pub fn extend(&mut self, clauses: impl IntoIterator<Item = Clause>) {
        for c in clauses {
            self.push(c);
        }
    }

    /// Drops every clause from position `len` on.
    pub fn truncate(&mut self, len: usize) {
        for c in self.clauses.drain(len.min(self.clauses.len())..) {
            let slot = self.index.get_mut(&c.head.pred).expect("indexed");
            slot.pop();
            if slot.is_empty() {
                self.index.remove(&c.head.pred);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn defines(&self, pred: SymId) -> bool {
        self.index.contains_key(&pred)
    }

    pub fn clause_indices(&self, pred: SymId) -> &[usize] {
        self.index.get(&pred).map_or(&[], Vec::as_slice)
    }

    pub fn definition(&self, pred: SymId) -> impl Iterator<Item = &Clause> {
        self.clause_indices(pred).iter().map(|&i| &self.clauses[i])
    }

    /// Head symbols in order of first definition.
    pub fn heads(&self) -> Vec<SymId> {
        let mut seen = std::collections::HashSet::new();
        self.clauses.iter().map(|c| c.head.pred).filter(|&p| seen.insert(p)).collect()
    }

    pub fn display<'a>(&'a self, vocab: &'a Vocabulary) -> impl fmt::Display + 'a {
        ProgramDisplay { program: self, vocab }
    }
}

struct ProgramDisplay<'a> {
    program: &'a Program,
    vocab: &'a Vocabulary,
}

impl fmt::Display for ProgramDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.program.clauses() {
            writeln!(f, "{}", c.display(self.vocab))?;
        }
        Ok(())
    }
}
