//! Canonical clause syntax.
//!
//! Lowercase identifiers are constants and functors, uppercase identifiers are
//! variables, integers are literals, and lists use `[a,b|T]`. Clauses print as
//! `head :- b1,b2.` and facts as `p(a,b).`. Printing then parsing any clause
//! whose variables use canonical names (`A`..`Z`, `A1`, ...) is the identity.

use std::collections::HashMap;

use thiserror::Error;

use super::clause::{Atom, Clause, Program};
use super::name::Name;
use super::symbol::{SymbolKind, VocabError, Vocabulary};
use super::term::{parse_var_name, Term, VarId, CONS, NIL};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("column {col}: {msg}")]
    Syntax { col: usize, msg: String },
    #[error(transparent)]
    Vocab(#[from] VocabError),
    #[error("`{name}` used with arity {used}, declared with {declared}")]
    Arity { name: String, used: usize, declared: u8 },
}

const PLACEHOLDER: VarId = 1 << 30;

struct Parser<'s> {
    src: &'s [u8],
    pos: usize,
    named: HashMap<String, VarId>,
    extra: VarId,
}

/// Atom whose predicate has not been resolved against a vocabulary yet.
struct RawAtom {
    name: String,
    args: Vec<Term>,
}

impl<'s> Parser<'s> {
    fn new(src: &'s str) -> Self {
        Parser { src: src.as_bytes(), pos: 0, named: HashMap::new(), extra: 0 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { col: self.pos + 1, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(token.as_bytes()) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), ParseError> {
        if self.eat(token) {
            Ok(())
        } else {
            self.err(format!("expected `{token}`"))
        }
    }

    fn ident(&mut self) -> Option<&'s str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn variable(&mut self, name: &str) -> Term {
        if name == "_" {
            self.extra += 1;
            return Term::Var(PLACEHOLDER + self.extra - 1);
        }
        if let Some(&id) = self.named.get(name) {
            return Term::Var(id);
        }
        let id = match parse_var_name(name) {
            Some(id) if id < PLACEHOLDER => id,
            _ => {
                self.extra += 1;
                PLACEHOLDER + self.extra - 1
            }
        };
        self.named.insert(name.to_owned(), id);
        Term::Var(id)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some(b'[') => self.list(),
            Some(c) if c == b'-' || c.is_ascii_digit() => self.integer(),
            Some(c) if c.is_ascii_uppercase() || c == b'_' => {
                let name = self.ident().unwrap();
                Ok(self.variable(name))
            }
            Some(c) if c.is_ascii_lowercase() => {
                let name = self.ident().unwrap();
                if self.peek() == Some(b'(') {
                    let args = self.args()?;
                    Ok(Term::structure(name, args))
                } else {
                    Ok(Term::constant(name))
                }
            }
            _ => self.err("expected a term"),
        }
    }

    fn integer(&mut self) -> Result<Term, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.src[self.pos] == b'-' {
            self.pos += 1;
        }
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match text.parse() {
            Ok(i) => Ok(Term::Int(i)),
            Err(_) => {
                self.pos = start;
                self.err(format!("bad integer `{text}`"))
            }
        }
    }

    fn list(&mut self) -> Result<Term, ParseError> {
        self.expect("[")?;
        if self.eat("]") {
            return Ok(Term::constant(NIL));
        }
        let mut items = vec![self.term()?];
        while self.eat(",") {
            items.push(self.term()?);
        }
        let tail = if self.eat("|") { self.term()? } else { Term::constant(NIL) };
        self.expect("]")?;
        let cons = Name::new(CONS);
        Ok(items.into_iter().rev().fold(tail, |t, h| Term::Struct(cons, vec![h, t].into())))
    }

    fn args(&mut self) -> Result<Vec<Term>, ParseError> {
        self.expect("(")?;
        let mut args = vec![self.term()?];
        while self.eat(",") {
            args.push(self.term()?);
        }
        self.expect(")")?;
        Ok(args)
    }

    fn raw_atom(&mut self) -> Result<RawAtom, ParseError> {
        match self.peek() {
            Some(c) if c.is_ascii_lowercase() => {}
            _ => return self.err("expected a predicate name"),
        }
        let name = self.ident().unwrap().to_owned();
        let args = self.args()?;
        Ok(RawAtom { name, args })
    }

    fn raw_clause(&mut self) -> Result<(RawAtom, Vec<RawAtom>), ParseError> {
        let head = self.raw_atom()?;
        let mut body = Vec::new();
        if self.eat(":-") {
            body.push(self.raw_atom()?);
            while self.eat(",") {
                body.push(self.raw_atom()?);
            }
        }
        self.expect(".")?;
        Ok((head, body))
    }

    /// Gives non-canonical variables the smallest ids above every canonical one.
    fn finish(&self, terms: &mut [&mut Vec<Term>]) {
        if self.extra == 0 {
            return;
        }
        let top = self
            .named
            .values()
            .filter(|&&v| v < PLACEHOLDER)
            .max()
            .map_or(0, |v| v + 1);
        let map = |v: VarId| if v >= PLACEHOLDER { top + (v - PLACEHOLDER) } else { v };
        for args in terms.iter_mut() {
            for t in args.iter_mut() {
                *t = t.rename(&map);
            }
        }
    }
}

fn resolve_atom(raw: RawAtom, vocab: &Vocabulary) -> Result<Atom, ParseError> {
    let pred = vocab.require(&raw.name)?;
    check_arity(vocab, &raw, pred)?;
    Ok(Atom::new(pred, raw.args))
}

fn declare_atom(raw: RawAtom, vocab: &mut Vocabulary, kind: SymbolKind) -> Result<Atom, ParseError> {
    let pred = match vocab.lookup(&raw.name) {
        Some(p) => p,
        None => vocab.declare(&raw.name, raw.args.len().min(255) as u8, kind)?,
    };
    check_arity(vocab, &raw, pred)?;
    Ok(Atom::new(pred, raw.args))
}

fn check_arity(vocab: &Vocabulary, raw: &RawAtom, pred: super::symbol::SymId) -> Result<(), ParseError> {
    let declared = vocab.arity(pred);
    if raw.args.len() != declared as usize {
        return Err(ParseError::Arity { name: raw.name.clone(), used: raw.args.len(), declared });
    }
    Ok(())
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text);
    let t = p.term()?;
    if !p.at_end() {
        return p.err("trailing input");
    }
    let mut holder = vec![t];
    p.finish(&mut [&mut holder]);
    Ok(holder.pop().unwrap())
}

/// Parses an atom (no trailing period) whose predicate is already declared.
pub fn parse_atom(text: &str, vocab: &Vocabulary) -> Result<Atom, ParseError> {
    let mut p = Parser::new(text);
    let mut raw = p.raw_atom()?;
    if !p.at_end() {
        return p.err("trailing input");
    }
    p.finish(&mut [&mut raw.args]);
    resolve_atom(raw, vocab)
}

/// Parses one clause whose predicates are all declared.
pub fn parse_clause(text: &str, vocab: &Vocabulary) -> Result<Clause, ParseError> {
    let mut p = Parser::new(text);
    let (mut head, mut body) = p.raw_clause()?;
    if !p.at_end() {
        return p.err("trailing input");
    }
    let mut refs: Vec<&mut Vec<Term>> = std::iter::once(&mut head.args).chain(body.iter_mut().map(|b| &mut b.args)).collect();
    p.finish(&mut refs);
    let head = resolve_atom(head, vocab)?;
    let body = body.into_iter().map(|b| resolve_atom(b, vocab)).collect::<Result<_, _>>()?;
    Ok(Clause::new(head, body))
}

/// Parses a sequence of clauses, declaring unknown predicates with `kind`.
/// Lines starting with `%` are comments.
pub fn parse_program(text: &str, vocab: &mut Vocabulary, kind: SymbolKind) -> Result<Program, ParseError> {
    let stripped: String = text
        .lines()
        .map(|l| if l.trim_start().starts_with('%') { "" } else { l })
        .collect::<Vec<_>>()
        .join("\n");
    let mut outer = Parser::new(&stripped);
    let mut program = Program::new();
    while !outer.at_end() {
        let mut p = Parser { src: outer.src, pos: outer.pos, named: HashMap::new(), extra: 0 };
        let (mut head, mut body) = p.raw_clause()?;
        outer.pos = p.pos;
        let mut refs: Vec<&mut Vec<Term>> =
            std::iter::once(&mut head.args).chain(body.iter_mut().map(|b| &mut b.args)).collect();
        p.finish(&mut refs);
        let head = declare_atom(head, vocab, kind)?;
        let body = body.into_iter().map(|b| declare_atom(b, vocab, kind)).collect::<Result<_, _>>()?;
        program.push(Clause::new(head, body));
    }
    Ok(program)
}
