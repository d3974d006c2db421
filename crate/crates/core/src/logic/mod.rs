//! Definite clauses, unification and bounded proof search.

mod clause;
mod name;
mod registry;
mod solve;
mod subst;
mod symbol;
mod term;
mod text;

pub use clause::{Atom, Clause, Program};
pub use name::Name;
pub use registry::{Evaluator, FluentFn, PrimitiveRegistry, TransitionFn};
pub use solve::{prove, prove_answers, Args, Cont, Flow, Goal, Limits, OpenResolver, PredRef, ProofOutcome, ProofResult, Solver};
pub use subst::{apply, unify_atoms, unify_terms, Bindings, Mark, Substitutable, Substitution};
pub use symbol::{SymId, Symbol, SymbolKind, VocabError, Vocabulary};
pub use term::{parse_var_name, var_name, Term, VarId};
pub use text::{parse_atom, parse_clause, parse_program, parse_term, ParseError};
