//! Depth-first SLD resolution over clauses plus host primitives.
//!
//! The solver is written in continuation-passing style: every successful
//! resolution calls the continuation `k`, and backtracking is a plain return
//! with [`Flow::Continue`]. Predicates that are neither primitives nor defined
//! by the program are delegated to an [`OpenResolver`], which is how the
//! meta-interpreter plugs hypothesis construction into the same machine.

use std::time::Instant;

use smallvec::SmallVec;

use super::clause::{Atom, Program};
use super::registry::{Evaluator, PrimitiveRegistry};
use super::subst::Bindings;
use super::symbol::{SymId, Vocabulary};
use super::term::Term;

pub type Args = SmallVec<[Term; 2]>;

/// Predicate position of a goal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PredRef {
    Sym(SymId),
    /// A predicate not yet chosen; `slot` and `tag` are interpreted by the resolver.
    Open { slot: u32, tag: u32 },
}

#[derive(Clone, Debug)]
pub struct Goal {
    pub pred: PredRef,
    pub args: Args,
}

impl Goal {
    pub fn from_atom(atom: &Atom) -> Goal {
        Goal { pred: PredRef::Sym(atom.pred), args: atom.args.iter().cloned().collect() }
    }
}

/// What a continuation asks the search to do next.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flow {
    /// Backtrack and look for more solutions.
    Continue,
    /// Accept the current solution and unwind.
    Stop,
    /// Budget exhausted; unwind without a verdict.
    Abort,
}

#[derive(Clone, Copy, Debug)]
pub struct Limits {
    /// Resolution-step cap.
    pub max_steps: u64,
    pub deadline: Option<Instant>,
    /// Maximum nesting of goals along one branch.
    pub max_depth: u32,
    pub occurs_check: bool,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_steps: 1_000_000, deadline: None, max_depth: 2048, occurs_check: true }
    }
}

impl Limits {
    pub fn steps(max_steps: u64) -> Self {
        Limits { max_steps, ..Limits::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProofOutcome {
    Proven,
    Refuted,
    /// Step cap, deadline or depth bound reached before a verdict.
    BudgetExhausted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProofResult {
    pub outcome: ProofOutcome,
    pub steps: u64,
}

pub type Cont<'k, 'a, X> = dyn FnMut(&mut Solver<'a, X>) -> Flow + 'k;

/// Resolution of predicates the program and registry know nothing about.
pub trait OpenResolver: Sized {
    fn resolve_open<'a>(solver: &mut Solver<'a, Self>, pred: PredRef, args: &[Term], k: &mut Cont<'_, 'a, Self>) -> Flow;
}

/// Plain SLD: undefined predicates fail.
impl OpenResolver for () {
    fn resolve_open<'a>(_: &mut Solver<'a, ()>, _: PredRef, _: &[Term], _: &mut Cont<'_, 'a, ()>) -> Flow {
        Flow::Continue
    }
}

#[derive(Clone, Copy)]
enum Def<'a> {
    Open,
    Primitive(&'a Evaluator),
    Clauses(&'a [usize]),
}

const STACK_RED_ZONE: usize = 1024 * 1024;
const STACK_SEGMENT: usize = 8 * 1024 * 1024;
/// The remaining stack is only measured every this many levels.
const STACK_CHECK_EVERY: u32 = 16;

pub struct Solver<'a, X = ()> {
    pub vocab: &'a Vocabulary,
    pub program: &'a Program,
    pub registry: &'a PrimitiveRegistry,
    defs: Vec<Def<'a>>,
    spans: Vec<u32>,
    pub bindings: Bindings,
    limits: Limits,
    steps: u64,
    depth: u32,
    truncated: bool,
    exhausted: bool,
    pub ext: X,
}

impl<'a> Solver<'a, ()> {
    pub fn new(vocab: &'a Vocabulary, program: &'a Program, registry: &'a PrimitiveRegistry, limits: Limits) -> Self {
        Solver::with_ext(vocab, program, registry, limits, ())
    }
}

impl<'a, X: OpenResolver> Solver<'a, X> {
    pub fn with_ext(
        vocab: &'a Vocabulary,
        program: &'a Program,
        registry: &'a PrimitiveRegistry,
        limits: Limits,
        ext: X,
    ) -> Self {
        let defs = vocab
            .ids()
            .map(|s| match registry.get(s) {
                Some(e) => Def::Primitive(e),
                None if program.defines(s) => Def::Clauses(program.clause_indices(s)),
                None => Def::Open,
            })
            .collect();
        let spans = program.clauses().iter().map(|c| c.var_span()).collect();
        Solver {
            vocab,
            program,
            registry,
            defs,
            spans,
            bindings: Bindings::new(0, limits.occurs_check),
            limits,
            steps: 0,
            depth: 0,
            truncated: false,
            exhausted: false,
            ext,
        }
    }

    /// Reserves the caller's variable ids `0..n` so fresh variables never clash with them.
    pub fn reserve_vars(&mut self, n: u32) {
        self.bindings = Bindings::new(n, self.limits.occurs_check);
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Carries a step count over from an earlier search sharing the same budget.
    pub fn set_steps(&mut self, steps: u64) {
        self.steps = steps;
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    /// A branch was cut by the depth bound, so failure is not a refutation.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn exhausted(&self) -> bool {
        self.exhausted
    }

    /// True when `sym` is answered by the registry or the program.
    pub fn is_background(&self, sym: SymId) -> bool {
        !matches!(self.defs.get(sym.index()), None | Some(Def::Open))
    }

    /// Budget left under the step cap.
    pub fn remaining_steps(&self) -> u64 {
        self.limits.max_steps.saturating_sub(self.steps)
    }

    /// Adds work done outside this solver to the step count; false once the budget is gone.
    pub fn charge(&mut self, steps: u64) -> bool {
        self.steps = self.steps.saturating_add(steps);
        if self.steps > self.limits.max_steps || self.limits.deadline.is_some_and(|d| Instant::now() >= d) {
            self.exhausted = true;
        }
        !self.exhausted
    }

    fn tick(&mut self) -> bool {
        if self.exhausted {
            return false;
        }
        self.steps += 1;
        if self.steps > self.limits.max_steps {
            self.exhausted = true;
            return false;
        }
        if self.steps & 0x3ff == 0 {
            if let Some(deadline) = self.limits.deadline {
                if Instant::now() >= deadline {
                    self.exhausted = true;
                    return false;
                }
            }
        }
        true
    }

    pub fn solve_conj(&mut self, goals: &[Goal], k: &mut Cont<'_, 'a, X>) -> Flow {
        match goals {
            [] => k(self),
            [g] => self.solve_atom(g.pred, &g.args, k),
            [g, rest @ ..] => self.solve_atom(g.pred, &g.args, &mut |s| s.solve_conj(rest, k)),
        }
    }

    pub fn solve_atom(&mut self, pred: PredRef, args: &[Term], k: &mut Cont<'_, 'a, X>) -> Flow {
        if !self.tick() {
            return Flow::Abort;
        }
        if self.depth >= self.limits.max_depth {
            self.truncated = true;
            return Flow::Continue;
        }
        self.depth += 1;
        let flow = if self.depth % STACK_CHECK_EVERY == 0 {
            stacker::maybe_grow(STACK_RED_ZONE, STACK_SEGMENT, || self.dispatch(pred, args, k))
        } else {
            self.dispatch(pred, args, k)
        };
        self.depth -= 1;
        flow
    }

    fn dispatch(&mut self, pred: PredRef, args: &[Term], k: &mut Cont<'_, 'a, X>) -> Flow {
        let def = match pred {
            PredRef::Sym(s) => self.defs.get(s.index()).copied().unwrap_or(Def::Open),
            PredRef::Open { .. } => Def::Open,
        };
        match def {
            Def::Primitive(e) => self.call_primitive(e, args, k),
            Def::Clauses(cs) => self.call_clauses(cs, args, k),
            Def::Open => X::resolve_open(self, pred, args, k),
        }
    }

    /// Unifies `a` with `b`, runs `k` on success and restores bindings afterwards.
    pub fn with_unified(&mut self, a: &Term, b: &Term, k: &mut Cont<'_, 'a, X>) -> Flow {
        let mark = self.bindings.mark();
        let flow = if self.bindings.unify(a, b) { k(self) } else { Flow::Continue };
        self.bindings.undo(mark);
        flow
    }

    fn call_primitive(&mut self, eval: &'a Evaluator, args: &[Term], k: &mut Cont<'_, 'a, X>) -> Flow {
        match eval {
            Evaluator::Transition(f) => {
                if args.len() != 2 {
                    return Flow::Continue;
                }
                let input = self.bindings.resolve(&args[0]);
                if !input.is_ground() {
                    return Flow::Continue;
                }
                match f(&input) {
                    Some(out) => self.with_unified(&args[1], &out, k),
                    None => Flow::Continue,
                }
            }
            Evaluator::Fluent(f) => {
                if args.len() != 1 {
                    return Flow::Continue;
                }
                let input = self.bindings.resolve(&args[0]);
                if input.is_ground() && f(&input) {
                    k(self)
                } else {
                    Flow::Continue
                }
            }
            Evaluator::Facts(rows) => {
                for row in rows {
                    let mark = self.bindings.mark();
                    let flow = if self.bindings.unify_args(args, row) { k(self) } else { Flow::Continue };
                    self.bindings.undo(mark);
                    if flow != Flow::Continue {
                        return flow;
                    }
                }
                Flow::Continue
            }
        }
    }

    fn call_clauses(&mut self, indices: &'a [usize], args: &[Term], k: &mut Cont<'_, 'a, X>) -> Flow {
        let program = self.program;
        for &ci in indices {
            let clause = &program.clauses()[ci];
            if clause.head.args.len() != args.len() {
                continue;
            }
            let mark = self.bindings.mark();
            let base = self.bindings.fresh(self.spans[ci]);
            let head_ok = clause
                .head
                .args
                .iter()
                .zip(args)
                .all(|(h, a)| self.bindings.unify(&h.offset_vars(base), a));
            let flow = if head_ok {
                let body: SmallVec<[Goal; 4]> = clause
                    .body
                    .iter()
                    .map(|b| Goal { pred: PredRef::Sym(b.pred), args: b.args.iter().map(|t| t.offset_vars(base)).collect() })
                    .collect();
                self.solve_conj(&body, k)
            } else {
                Flow::Continue
            };
            self.bindings.undo(mark);
            if flow != Flow::Continue {
                return flow;
            }
        }
        Flow::Continue
    }

    /// Maps a finished search to an outcome.
    pub fn outcome(&self, flow: Flow) -> ProofOutcome {
        match flow {
            Flow::Stop => ProofOutcome::Proven,
            Flow::Abort => ProofOutcome::BudgetExhausted,
            Flow::Continue if self.truncated => ProofOutcome::BudgetExhausted,
            Flow::Continue => ProofOutcome::Refuted,
        }
    }
}

fn goal_span(goals: &[Atom]) -> u32 {
    goals.iter().filter_map(Atom::max_var).max().map_or(0, |v| v + 1)
}

/// Proves a conjunction of goals against `program` and the registry.
pub fn prove(
    goals: &[Atom],
    program: &Program,
    registry: &PrimitiveRegistry,
    vocab: &Vocabulary,
    limits: Limits,
) -> ProofResult {
    let mut solver = Solver::new(vocab, program, registry, limits);
    solver.reserve_vars(goal_span(goals));
    let query: Vec<Goal> = goals.iter().map(Goal::from_atom).collect();
    let flow = solver.solve_conj(&query, &mut |_| Flow::Stop);
    ProofResult { outcome: solver.outcome(flow), steps: solver.steps() }
}

/// Collects up to `max` answer instances of `goals`, in search order.
pub fn prove_answers(
    goals: &[Atom],
    program: &Program,
    registry: &PrimitiveRegistry,
    vocab: &Vocabulary,
    limits: Limits,
    max: usize,
) -> (Vec<Vec<Atom>>, ProofOutcome) {
    let mut solver = Solver::new(vocab, program, registry, limits);
    solver.reserve_vars(goal_span(goals));
    let query: Vec<Goal> = goals.iter().map(Goal::from_atom).collect();
    let mut answers = Vec::new();
    let flow = solver.solve_conj(&query, &mut |s| {
        answers.push(goals.iter().map(|g| s.bindings.resolve_atom(g)).collect());
        if answers.len() >= max {
            Flow::Stop
        } else {
            Flow::Continue
        }
    });
    let outcome = match (flow, answers.is_empty()) {
        (Flow::Abort, _) => ProofOutcome::BudgetExhausted,
        (_, false) => ProofOutcome::Proven,
        (f, true) => solver.outcome(f),
    };
    (answers, outcome)
}
