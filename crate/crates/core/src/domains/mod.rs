//! Robot and Lego worlds: primitive semantics and seeded task generation.

pub mod lego;
pub mod robot;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::corpus::{CorpusTask, TaskCorpus};
use crate::logic::{Atom, Evaluator, Limits, PrimitiveRegistry, Program, SymId, SymbolKind, Term, VocabError, Vocabulary};
use crate::metarule::MetaruleSet;
use crate::mil::brute::{brute_force, TooMany};
use crate::mil::{Background, LearnTask, MilError};
use crate::signature::Signature;

use lego::LegoState;
use robot::RobotState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    Robot,
    Lego,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::Robot => "robot",
            Domain::Lego => "lego",
        })
    }
}

impl FromStr for Domain {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "robot" => Ok(Domain::Robot),
            "lego" => Ok(Domain::Lego),
            _ => Err(format!("unknown domain `{s}` (expected robot or lego)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum WorldError {
    #[error(transparent)]
    Vocab(#[from] VocabError),
    #[error("task `{0}`: {1}")]
    Task(String, MilError),
    #[error("corpus is for {found}, world is {expected}")]
    DomainMismatch { expected: Domain, found: Domain },
}

impl Domain {
    /// Primitive symbols with arities, in signature order.
    pub fn primitives(self) -> Vec<(&'static str, u8)> {
        match self {
            Domain::Robot => robot::ACTIONS.iter().map(|&a| (a, 2)).collect(),
            Domain::Lego => lego::ACTIONS
                .iter()
                .map(|&a| (a, 2))
                .chain(lego::FLUENTS.iter().map(|&f| (f, 1)))
                .collect(),
        }
    }

    /// Host semantics of a dyadic primitive, by name.
    pub fn apply(self, action: &str, state: &Term) -> Option<Term> {
        let i = self.primitives().iter().position(|&(a, arity)| a == action && arity == 2)?;
        self.apply_nth(i, state)
    }

    fn apply_nth(self, i: usize, state: &Term) -> Option<Term> {
        match self {
            Domain::Robot => RobotState::from_term(state)?.step(robot::Action::ALL[i]).map(|s| s.to_term()),
            Domain::Lego => LegoState::from_term(state)?.step(lego::Action::ALL[i]).map(|s| s.to_term()),
        }
    }

    /// Host semantics of a monadic primitive, by name.
    pub fn holds(self, fluent: &str, state: &Term) -> bool {
        match self {
            Domain::Robot => false,
            Domain::Lego => match lego::FLUENTS.iter().position(|&f| f == fluent) {
                Some(i) => Self::holds_nth(i, state),
                None => false,
            },
        }
    }

    fn holds_nth(i: usize, state: &Term) -> bool {
        LegoState::from_term(state).is_some_and(|s| s.holds(lego::Fluent::ALL[i]))
    }

    /// Declares the primitives and registers their evaluators.
    pub fn install(self, vocab: &mut Vocabulary, registry: &mut PrimitiveRegistry) -> Result<Vec<SymId>, VocabError> {
        let mut out = Vec::new();
        let dyadic = self.primitives().iter().filter(|p| p.1 == 2).count();
        for (i, (name, arity)) in self.primitives().into_iter().enumerate() {
            let sym = vocab.declare(name, arity, SymbolKind::Primitive)?;
            let eval = if arity == 2 {
                Evaluator::Transition(std::sync::Arc::new(move |s: &Term| self.apply_nth(i, s)))
            } else {
                Evaluator::Fluent(std::sync::Arc::new(move |s: &Term| Self::holds_nth(i - dyadic, s)))
            };
            registry.insert(sym, eval);
            out.push(sym);
        }
        Ok(out)
    }

    /// A uniformly random start and goal state pair for one task.
    pub fn sample_pair(self, rng: &mut impl Rng) -> (Term, Term) {
        match self {
            Domain::Robot => {
                let a = sample_robot(rng);
                let b = sample_robot(rng);
                (a.to_term(), b.to_term())
            }
            Domain::Lego => (LegoState::default().to_term(), sample_lego_goal(rng).to_term()),
        }
    }

    /// `count` one-shot tasks named `t1..`, reproducible from `seed`.
    pub fn gen_tasks(self, count: usize, seed: u64) -> TaskCorpus {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tasks = (1..=count)
            .map(|i| {
                let (a, b) = self.sample_pair(&mut rng);
                CorpusTask::one_shot(format!("t{i}"), vec![a, b])
            })
            .collect();
        TaskCorpus::new(self, Some(seed), tasks).expect("generated names are unique")
    }
}

/// Uniform over the 1332 valid robot states.
pub fn sample_robot(rng: &mut impl Rng) -> RobotState {
    let n = robot::SIZE;
    let cells = n * n;
    let i = rng.gen_range(0..cells * cells + cells);
    let cell = |c: i64| (c / n + 1, c % n + 1);
    if i < cells * cells {
        RobotState { robot: cell(i / cells), ball: cell(i % cells), holding: false }
    } else {
        let c = cell(i - cells * cells);
        RobotState { robot: c, ball: c, holding: true }
    }
}

/// Heights i.i.d. uniform on 0..=MAX_HEIGHT with at least one block; cursor uniform.
pub fn sample_lego_goal(rng: &mut impl Rng) -> LegoState {
    loop {
        let mut board = [0; lego::WIDTH];
        for h in &mut board {
            *h = rng.gen_range(0..=lego::MAX_HEIGHT);
        }
        let cursor = rng.gen_range(1..=lego::WIDTH);
        if board.iter().any(|&h| h > 0) {
            return LegoState { cursor, board };
        }
    }
}

/// A domain's vocabulary and primitive evaluators.
#[derive(Clone)]
pub struct World {
    pub domain: Domain,
    pub vocab: Vocabulary,
    pub registry: PrimitiveRegistry,
    pub primitives: Vec<SymId>,
}

impl World {
    pub fn new(domain: Domain) -> World {
        let mut vocab = Vocabulary::new();
        let mut registry = PrimitiveRegistry::new();
        let primitives = domain.install(&mut vocab, &mut registry).expect("fresh vocabulary");
        World { domain, vocab, registry, primitives }
    }

    /// The primitives, all protected.
    pub fn signature(&self) -> Signature {
        Signature::with_protected(self.primitives.iter().copied())
    }

    /// Declares each task's target and `max_invented` invented symbols.
    pub fn declare_tasks(&mut self, corpus: &TaskCorpus, max_invented: usize) -> Result<Vec<LearnTask>, WorldError> {
        if corpus.domain != self.domain {
            return Err(WorldError::DomainMismatch { expected: self.domain, found: corpus.domain });
        }
        corpus
            .tasks
            .iter()
            .map(|t| {
                let target = self.vocab.declare(&t.name, t.arity() as u8, SymbolKind::Target)?;
                self.vocab.declare_invented(target, max_invented)?;
                let atoms = |ex: &[Vec<Term>]| ex.iter().map(|a| Atom::new(target, a.clone())).collect();
                LearnTask::new(target, atoms(&t.positives), atoms(&t.negatives)).map_err(|e| WorldError::Task(t.name.clone(), e))
            })
            .collect()
    }
}

/// Whether some program of at most `max_size` clauses over the primitives covers
/// `task`, by plain enumeration. `cap` bounds the programs tried per size.
pub fn solvable_oracle(
    world: &World,
    metarules: &MetaruleSet,
    task: &LearnTask,
    max_size: usize,
    cap: u128,
) -> Result<bool, TooMany> {
    let bk = Program::new();
    let env = Background { vocab: &world.vocab, registry: &world.registry, metarules, bk: &bk };
    let invented = world.vocab.invented_for(task.target, max_size.saturating_sub(1)).unwrap_or_default();
    for size in 1..=max_size {
        if brute_force(&env, &world.primitives, &invented, task, size, Limits::steps(100_000), cap)?.is_some() {
            return Ok(true);
        }
    }
    Ok(false)
}
