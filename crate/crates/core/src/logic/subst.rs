//! Unification and substitutions.
//!
//! [`Bindings`] is the trail-based store used inside proof search. The public
//! [`Substitution`] is a persistent map; [`unify_terms`] and friends run the same
//! algorithm through a scratch [`Bindings`] and export an idempotent result.

use std::collections::BTreeMap;

use super::clause::{Atom, Clause};
use super::term::{Term, VarId};

/// Resolution stops expanding below this nesting; only reachable with cyclic
/// bindings, which require the occurs check to be off.
const RESOLVE_DEPTH_LIMIT: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mark {
    trail: usize,
    next: VarId,
}

#[derive(Clone, Debug, Default)]
pub struct Bindings {
    slots: Vec<Option<Term>>,
    trail: Vec<VarId>,
    next: VarId,
    occurs_check: bool,
}

impl Bindings {
    /// Store whose fresh variables start after `reserved` caller-owned ids.
    pub fn new(reserved: VarId, occurs_check: bool) -> Self {
        Bindings {
            slots: vec![None; reserved as usize],
            trail: Vec::new(),
            next: reserved,
            occurs_check,
        }
    }

    pub fn occurs_check(&self) -> bool {
        self.occurs_check
    }

    /// Reserves `n` fresh variable ids and returns the first.
    pub fn fresh(&mut self, n: VarId) -> VarId {
        let base = self.next;
        self.next += n;
        if self.slots.len() < self.next as usize {
            self.slots.resize(self.next as usize, None);
        }
        base
    }

    pub fn mark(&self) -> Mark {
        Mark { trail: self.trail.len(), next: self.next }
    }

    pub fn undo(&mut self, mark: Mark) {
        for v in self.trail.drain(mark.trail..) {
            self.slots[v as usize] = None;
        }
        self.next = mark.next;
    }

    pub fn lookup(&self, v: VarId) -> Option<&Term> {
        self.slots.get(v as usize).and_then(Option::as_ref)
    }

    pub fn bind(&mut self, v: VarId, t: Term) {
        if self.slots.len() <= v as usize {
            self.slots.resize(v as usize + 1, None);
        }
        debug_assert!(self.slots[v as usize].is_none());
        self.slots[v as usize] = Some(t);
        self.trail.push(v);
    }

    pub fn deref<'a>(&'a self, mut t: &'a Term) -> &'a Term {
        while let Term::Var(v) = t {
            match self.lookup(*v) {
                Some(next) => t = next,
                None => break,
            }
        }
        t
    }

    fn occurs(&self, v: VarId, t: &Term) -> bool {
        match self.deref(t) {
            Term::Var(w) => *w == v,
            Term::Struct(_, args) => args.iter().any(|a| match a {
                Term::Int(_) | Term::Const(_) => false,
                _ => self.occurs(v, a),
            }),
            _ => false,
        }
    }

    /// Most general unification; on failure the caller undoes to its own mark.
    pub fn unify(&mut self, a: &Term, b: &Term) -> bool {
        let (a, b) = (self.deref(a), self.deref(b));
        match (a, b) {
            (Term::Var(x), Term::Var(y)) if x == y => true,
            (&Term::Var(x), _) => {
                let b = b.clone();
                self.bind_checked(x, b)
            }
            (_, &Term::Var(y)) => {
                let a = a.clone();
                self.bind_checked(y, a)
            }
            (Term::Int(x), Term::Int(y)) => x == y,
            (Term::Const(x), Term::Const(y)) => x == y,
            (Term::Struct(f, xs), Term::Struct(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return false;
                }
                if std::sync::Arc::ptr_eq(xs, ys) {
                    return true;
                }
                let (xs, ys) = (xs.clone(), ys.clone());
                xs.iter().zip(ys.iter()).all(|(x, y)| self.unify(x, y))
            }
            _ => false,
        }
    }

    fn bind_checked(&mut self, v: VarId, t: Term) -> bool {
        if self.occurs_check && self.occurs(v, &t) {
            return false;
        }
        self.bind(v, t);
        true
    }

    pub fn unify_args(&mut self, xs: &[Term], ys: &[Term]) -> bool {
        xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.unify(x, y))
    }

    /// Fully applies the current bindings.
    pub fn resolve(&self, t: &Term) -> Term {
        self.resolve_bounded(t, 0)
    }

    fn resolve_bounded(&self, t: &Term, depth: usize) -> Term {
        if depth > RESOLVE_DEPTH_LIMIT {
            return t.clone();
        }
        match self.deref(t) {
            Term::Struct(f, args) if !args.iter().all(Term::is_ground) => {
                Term::Struct(*f, args.iter().map(|a| self.resolve_bounded(a, depth + 1)).collect())
            }
            other => other.clone(),
        }
    }

    pub fn resolve_atom(&self, atom: &Atom) -> Atom {
        Atom { pred: atom.pred, args: atom.args.iter().map(|t| self.resolve(t)).collect() }
    }
}

/// A finite map from variables to terms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    map: BTreeMap<VarId, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (VarId, Term)>) -> Self {
        Substitution { map: pairs.into_iter().collect() }
    }

    pub fn get(&self, v: VarId) -> Option<&Term> {
        self.map.get(&v)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VarId, &Term)> {
        self.map.iter()
    }

    fn to_bindings(&self, extra: &[&Term], occurs_check: bool) -> Bindings {
        let span = self
            .map
            .iter()
            .flat_map(|(v, t)| std::iter::once(Some(*v)).chain(std::iter::once(t.max_var())))
            .chain(extra.iter().map(|t| t.max_var()))
            .flatten()
            .max()
            .map_or(0, |v| v + 1);
        let mut b = Bindings::new(span, occurs_check);
        for (v, t) in &self.map {
            b.bind(*v, t.clone());
        }
        b
    }

    fn from_bindings(b: &Bindings, domain: impl IntoIterator<Item = VarId>) -> Substitution {
        Substitution {
            map: domain
                .into_iter()
                .filter_map(|v| b.lookup(v).map(|_| (v, b.resolve(&Term::Var(v)))))
                .collect(),
        }
    }
}

/// Anything a substitution can be applied to.
pub trait Substitutable {
    fn apply_with(&self, b: &Bindings) -> Self;
    fn max_var(&self) -> Option<VarId>;
}

impl Substitutable for Term {
    fn apply_with(&self, b: &Bindings) -> Self {
        b.resolve(self)
    }
    fn max_var(&self) -> Option<VarId> {
        Term::max_var(self)
    }
}

impl Substitutable for Atom {
    fn apply_with(&self, b: &Bindings) -> Self {
        b.resolve_atom(self)
    }
    fn max_var(&self) -> Option<VarId> {
        Atom::max_var(self)
    }
}

impl Substitutable for Clause {
    fn apply_with(&self, b: &Bindings) -> Self {
        Clause {
            head: b.resolve_atom(&self.head),
            body: self.body.iter().map(|a| b.resolve_atom(a)).collect(),
        }
    }
    fn max_var(&self) -> Option<VarId> {
        self.atoms().filter_map(Atom::max_var).max()
    }
}

/// Replaces every bound variable, following chains transitively.
pub fn apply<T: Substitutable>(theta: &Substitution, t: &T) -> T {
    let anchor = t.max_var().map(Term::Var);
    let extra: Vec<&Term> = anchor.iter().collect();
    let b = theta.to_bindings(&extra, false);
    t.apply_with(&b)
}

/// Extends `theta` to a most general unifier of `a` and `b`, or `None`.
pub fn unify_terms(a: &Term, b: &Term, theta: &Substitution, occurs_check: bool) -> Option<Substitution> {
    let mut bindings = theta.to_bindings(&[a, b], occurs_check);
    if !bindings.unify(a, b) {
        return None;
    }
    let mut domain: Vec<VarId> = theta.map.keys().copied().collect();
    a.vars_in_order(&mut domain);
    b.vars_in_order(&mut domain);
    Some(Substitution::from_bindings(&bindings, domain))
}

pub fn unify_atoms(a: &Atom, b: &Atom, theta: &Substitution, occurs_check: bool) -> Option<Substitution> {
    if a.pred != b.pred || a.args.len() != b.args.len() {
        return None;
    }
    let refs: Vec<&Term> = a.args.iter().chain(&b.args).collect();
    let mut bindings = theta.to_bindings(&refs, occurs_check);
    if !bindings.unify_args(&a.args, &b.args) {
        return None;
    }
    let mut domain: Vec<VarId> = theta.map.keys().copied().collect();
    for t in refs {
        t.vars_in_order(&mut domain);
    }
    Some(Substitution::from_bindings(&bindings, domain))
}
