use thiserror::Error;

use crate::logic::{apply, unify_atoms, Atom, Clause, Program, Substitution, SymId, SymbolKind, Vocabulary};

/// Upper bound on the clauses one unfolding may produce.
pub const MAX_UNFOLDED: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UnfoldError {
    #[error("invented predicates `{0}` call each other in a cycle")]
    Cycle(String),
    #[error("invented predicate `{0}` has no clauses")]
    Undefined(String),
    #[error("unfolding exceeds {MAX_UNFOLDED} clauses")]
    TooLarge,
}

struct Lit {
    atom: Atom,
    /// Invented predicates whose definitions produced this literal, outermost first.
    via: Vec<SymId>,
}

/// Replaces invented body literals of `c` by their definitions until only
/// primitives, non-invented symbols, `c`'s own head and direct self-calls of
/// an invented predicate remain. One output clause per choice of defining clauses.
pub fn unfold(c: &Clause, b: &Program, vocab: &Vocabulary) -> Result<Vec<Clause>, UnfoldError> {
    let head = c.head.pred;
    let expandable = |l: &Lit| {
        vocab.kind(l.atom.pred) == SymbolKind::Invented && l.atom.pred != head && l.via.last() != Some(&l.atom.pred)
    };
    let mut next_var = c.var_span();
    let mut work = vec![(c.head.clone(), c.body.iter().map(|a| Lit { atom: a.clone(), via: Vec::new() }).collect::<Vec<_>>())];
    let mut done = Vec::new();
    while let Some((h, body)) = work.pop() {
        let Some(i) = body.iter().position(|l| expandable(l)) else {
            done.push(Clause::new(h, body.into_iter().map(|l| l.atom).collect()).normalized());
            if done.len() > MAX_UNFOLDED {
                return Err(UnfoldError::TooLarge);
            }
            continue;
        };
        let lit = &body[i];
        let p = lit.atom.pred;
        if lit.via.contains(&p) {
            return Err(UnfoldError::Cycle(vocab.name(p).to_owned()));
        }
        if !b.defines(p) {
            return Err(UnfoldError::Undefined(vocab.name(p).to_owned()));
        }
        let mut alternatives = Vec::new();
        for d in b.definition(p) {
            let offset = next_var;
            next_var += d.var_span();
            let renamed = |a: &Atom| a.rename(&|v| v + offset);
            let Some(theta) = unify_atoms(&renamed(&d.head), &lit.atom, &Substitution::new(), true) else {
                continue;
            };
            let mut via = lit.via.clone();
            via.push(p);
            let mut new_body = Vec::with_capacity(body.len() + d.body.len());
            for (j, l) in body.iter().enumerate() {
                if j == i {
                    new_body.extend(d.body.iter().map(|a| Lit { atom: apply(&theta, &renamed(a)), via: via.clone() }));
                } else {
                    new_body.push(Lit { atom: apply(&theta, &l.atom), via: l.via.clone() });
                }
            }
            alternatives.push((apply(&theta, &h), new_body));
        }
        if work.len() + alternatives.len() + done.len() > MAX_UNFOLDED {
            return Err(UnfoldError::TooLarge);
        }
        // Reverse so the first defining clause is expanded first.
        work.extend(alternatives.into_iter().rev());
    }
    Ok(done)
}

/// Every clause of `b` unfolded, in order.
pub fn unfold_program(b: &Program, vocab: &Vocabulary) -> Result<Program, UnfoldError> {
    let mut out = Program::new();
    for c in b.clauses() {
        out.extend(unfold(c, b, vocab)?);
    }
    Ok(out)
}
