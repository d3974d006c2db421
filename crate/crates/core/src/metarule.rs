//! Second-order clause templates and their projection to first-order clauses.
//!
//! Text form: `chain: P(A,B) :- Q(A,C), R(C,B).` The head's predicate variable
//! is the one a hypothesis defines; every other predicate variable is filled
//! from the signature during search. Arities of predicate variables are read
//! off their uses.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::logic::{Atom, Clause, SymId, Term, Vocabulary};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetaruleError {
    #[error("metarule syntax: {0}")]
    Syntax(String),
    #[error("predicate variable {var} used with arities {first} and {second}")]
    InconsistentArity { var: String, first: u8, second: u8 },
    #[error("{var} needs a {expected}-ary symbol, `{symbol}` has arity {got}")]
    ArityMismatch { var: String, symbol: String, expected: u8, got: u8 },
    #[error("no binding for predicate variable {0}")]
    Unbound(String),
    #[error("`{0}` is not a predicate variable of this metarule")]
    UnknownVar(String),
    #[error("duplicate metarule name `{0}`")]
    DuplicateName(String),
    #[error("a metarule set needs at least one metarule")]
    Empty,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateVar {
    pub name: String,
    pub arity: u8,
}

/// A literal schema: predicate variable index plus first-order variable indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiteralSchema {
    pub var: usize,
    pub args: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metarule {
    pub name: String,
    pub vars: Vec<PredicateVar>,
    pub head: LiteralSchema,
    pub body: Vec<LiteralSchema>,
    fo_names: Vec<String>,
}

impl Metarule {
    pub fn parse(text: &str) -> Result<Metarule, MetaruleError> {
        let syntax = |m: &str| MetaruleError::Syntax(format!("{m} in `{}`", text.trim()));
        let (name, rest) = text.split_once(':').ok_or_else(|| syntax("missing name"))?;
        let name = name.trim();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(syntax("bad name"));
        }
        let rest = rest.trim();
        let rest = rest.strip_suffix('.').ok_or_else(|| syntax("missing final `.`"))?;
        let (head_text, body_text) = match rest.split_once(":-") {
            Some((h, b)) => (h, Some(b)),
            None => (rest, None),
        };
        let mut vars: Vec<PredicateVar> = Vec::new();
        let mut fo_names: Vec<String> = Vec::new();
        let mut literal = |lit: &str| -> Result<LiteralSchema, MetaruleError> {
            let lit = lit.trim();
            let (pv, args) = lit.split_once('(').ok_or_else(|| syntax("literal without arguments"))?;
            let args = args.strip_suffix(')').ok_or_else(|| syntax("unclosed literal"))?;
            let pv = pv.trim();
            if !pv.starts_with(|c: char| c.is_ascii_uppercase()) {
                return Err(syntax("predicate position must be a variable"));
            }
            let args: Vec<&str> = args.split(',').map(str::trim).collect();
            if args.iter().any(|a| !a.starts_with(|c: char| c.is_ascii_uppercase())) {
                return Err(syntax("arguments must be variables"));
            }
            let arity = args.len() as u8;
            if !(1..=2).contains(&arity) {
                return Err(syntax("arity must be 1 or 2"));
            }
            let var = match vars.iter().position(|v| v.name == pv) {
                Some(i) if vars[i].arity != arity => {
                    return Err(MetaruleError::InconsistentArity {
                        var: pv.to_owned(),
                        first: vars[i].arity,
                        second: arity,
                    })
                }
                Some(i) => i,
                None => {
                    vars.push(PredicateVar { name: pv.to_owned(), arity });
                    vars.len() - 1
                }
            };
            let args = args
                .iter()
                .map(|a| match fo_names.iter().position(|n| n == a) {
                    Some(i) => i as u32,
                    None => {
                        fo_names.push((*a).to_owned());
                        (fo_names.len() - 1) as u32
                    }
                })
                .collect();
            Ok(LiteralSchema { var, args })
        };
        let head = literal(head_text)?;
        let body = match body_text {
            None => Vec::new(),
            Some(b) => split_literals(b).into_iter().map(&mut literal).collect::<Result<_, _>>()?,
        };
        Ok(Metarule { name: name.to_owned(), vars, head, body, fo_names })
    }

    /// Number of body literals.
    pub fn body_len(&self) -> usize {
        self.body.len()
    }

    pub fn head_arity(&self) -> u8 {
        self.vars[self.head.var].arity
    }

    pub fn fo_var_count(&self) -> u32 {
        self.fo_names.len() as u32
    }

    /// True when body literal `i` starts from the head's first argument, so
    /// binding it to the head symbol would recurse without progress.
    pub fn is_left_guarded(&self, i: usize) -> bool {
        self.body[i].args.first() == self.head.args.first()
    }

    /// Instantiates the template. Variables are numbered in first-occurrence order.
    pub fn project(&self, mu: &Metasubstitution, vocab: &Vocabulary) -> Result<Clause, MetaruleError> {
        if mu.bindings.len() != self.vars.len() {
            return Err(MetaruleError::Unbound(self.vars[mu.bindings.len().min(self.vars.len() - 1)].name.clone()));
        }
        for (v, &sym) in self.vars.iter().zip(&mu.bindings) {
            let got = vocab.arity(sym);
            if got != v.arity {
                return Err(MetaruleError::ArityMismatch {
                    var: v.name.clone(),
                    symbol: vocab.name(sym).to_owned(),
                    expected: v.arity,
                    got,
                });
            }
        }
        Ok(self.instantiate(&mu.bindings))
    }

    /// Projection without arity checks; `symbols` is indexed like `vars`.
    pub(crate) fn instantiate(&self, symbols: &[SymId]) -> Clause {
        let atom = |l: &LiteralSchema| Atom::new(symbols[l.var], l.args.iter().map(|&a| Term::Var(a)).collect());
        Clause::new(atom(&self.head), self.body.iter().map(atom).collect())
    }
}

fn split_literals(body: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut start = 0;
    for (i, c) in body.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&body[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&body[start..]);
    out
}

impl fmt::Display for Metarule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lit = |l: &LiteralSchema| {
            let args: Vec<&str> = l.args.iter().map(|&a| self.fo_names[a as usize].as_str()).collect();
            format!("{}({})", self.vars[l.var].name, args.join(","))
        };
        write!(f, "{}: {}", self.name, lit(&self.head))?;
        if !self.body.is_empty() {
            let body: Vec<String> = self.body.iter().map(lit).collect();
            write!(f, " :- {}", body.join(", "))?;
        }
        f.write_str(".")
    }
}

/// Binding of every predicate variable of one metarule, in the rule's variable order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Metasubstitution {
    pub bindings: Vec<SymId>,
}

impl Metasubstitution {
    /// Builds a metasubstitution from `(variable name, symbol)` pairs; must be total.
    pub fn new(rule: &Metarule, pairs: &[(&str, SymId)]) -> Result<Self, MetaruleError> {
        let map: HashMap<&str, SymId> = pairs.iter().copied().collect();
        for (name, _) in pairs {
            if !rule.vars.iter().any(|v| v.name == *name) {
                return Err(MetaruleError::UnknownVar((*name).to_owned()));
            }
        }
        let bindings = rule
            .vars
            .iter()
            .map(|v| map.get(v.name.as_str()).copied().ok_or_else(|| MetaruleError::Unbound(v.name.clone())))
            .collect::<Result<_, _>>()?;
        Ok(Metasubstitution { bindings })
    }
}

/// Ordered collection of metarules with unique names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetaruleSet {
    rules: Vec<Metarule>,
}

pub const STANDARD_METARULES: &str = "\
ident: P(A,B) :- Q(A,B).
precon: P(A,B) :- Q(A), R(A,B).
postcon: P(A,B) :- Q(A,B), R(B).
chain: P(A,B) :- Q(A,C), R(C,B).
";

impl MetaruleSet {
    pub fn new(rules: Vec<Metarule>) -> Result<Self, MetaruleError> {
        if rules.is_empty() {
            return Err(MetaruleError::Empty);
        }
        for (i, r) in rules.iter().enumerate() {
            if rules[..i].iter().any(|o| o.name == r.name) {
                return Err(MetaruleError::DuplicateName(r.name.clone()));
            }
        }
        Ok(MetaruleSet { rules })
    }

    /// ident, precon, postcon and chain.
    pub fn standard() -> Self {
        Self::parse(STANDARD_METARULES).expect("built-in metarules parse")
    }

    /// One metarule per non-empty line; `%` starts a comment line.
    pub fn parse(text: &str) -> Result<Self, MetaruleError> {
        let rules = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('%'))
            .map(Metarule::parse)
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(rules)
    }

    /// Number of metarules.
    pub fn m(&self) -> usize {
        self.rules.len()
    }

    /// Maximum number of body literals.
    pub fn j(&self) -> usize {
        self.rules.iter().map(Metarule::body_len).max().unwrap_or(0)
    }

    pub fn get(&self, name: &str) -> Option<&Metarule> {
        self.rules.iter().find(|r| r.name == name)
    }

    pub fn rules(&self) -> &[Metarule] {
        &self.rules
    }

    pub fn iter(&self) -> impl Iterator<Item = &Metarule> {
        self.rules.iter()
    }

    /// Keeps only the named rules, in this set's order.
    pub fn subset(&self, names: &[&str]) -> Result<Self, MetaruleError> {
        Self::new(self.rules.iter().filter(|r| names.contains(&r.name.as_str())).cloned().collect())
    }
}

impl fmt::Display for MetaruleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}
