//! The meta-interpreter: proves target goals by instantiating metarules on demand.

use smallvec::SmallVec;

use crate::logic::{
    prove, Atom, Bindings, Clause, Cont, Flow, Goal, Limits, OpenResolver, PredRef, Program, ProofOutcome, Solver,
    SymId, Term,
};
use crate::metarule::{MetaruleSet, Metasubstitution};
use crate::signature::Signature;

use super::Background;

const LEFT_GUARD: u32 = 1;

#[derive(Clone, Copy, Debug)]
struct Sub {
    rule: usize,
    head: SymId,
    base: usize,
}

/// A complete hypothesis found by the search, in instantiation order.
#[derive(Clone, Debug)]
pub struct Hypothesis {
    pub metasubs: Vec<(usize, Metasubstitution)>,
    pub program: Program,
}

pub(crate) struct MetaSearch<'m> {
    rules: &'m MetaruleSet,
    by_arity: [Vec<SymId>; 3],
    target: SymId,
    invented: &'m [SymId],
    max_size: usize,
    subs: Vec<Sub>,
    slots: Vec<Option<SymId>>,
    slot_owner: Vec<usize>,
    used_invented: usize,
    /// Meta goals on the current branch; the hash is kept only for ground goals,
    /// whose bindings cannot change underneath it.
    ancestors: Vec<(SymId, Option<u64>, SmallVec<[Term; 2]>)>,
}

impl<'m> MetaSearch<'m> {
    fn new(rules: &'m MetaruleSet, sig: &Signature, target: SymId, invented: &'m [SymId], max_size: usize, arity: impl Fn(SymId) -> u8) -> Self {
        let mut by_arity: [Vec<SymId>; 3] = Default::default();
        for &s in sig.symbols() {
            by_arity[arity(s) as usize].push(s);
        }
        MetaSearch {
            rules,
            by_arity,
            target,
            invented,
            max_size,
            subs: Vec::new(),
            slots: Vec::new(),
            slot_owner: Vec::new(),
            used_invented: 0,
            ancestors: Vec::new(),
        }
    }

    fn is_invented(&self, s: SymId) -> bool {
        self.invented.contains(&s)
    }

    fn is_meta(&self, s: SymId) -> bool {
        s == self.target || self.is_invented(s)
    }

    fn bindings_of(&self, i: usize) -> Vec<SymId> {
        let sub = self.subs[i];
        let n = self.rules.rules()[sub.rule].vars.len();
        self.slots[sub.base..sub.base + n].iter().map(|s| s.expect("complete metasub")).collect()
    }

    fn slots_of(&self, i: usize) -> &[Option<SymId>] {
        let sub = self.subs[i];
        &self.slots[sub.base..sub.base + self.rules.rules()[sub.rule].vars.len()]
    }

    fn duplicates(&self, i: usize) -> bool {
        let me = self.subs[i];
        let mine = self.slots_of(i);
        (0..self.subs.len()).any(|j| j != i && self.subs[j].rule == me.rule && self.slots_of(j) == mine)
    }

    /// True if `to` is reachable from `from` along invented-to-invented calls.
    fn reaches(&self, from: SymId, to: SymId) -> bool {
        let mut stack = vec![from];
        let mut seen: SmallVec<[SymId; 8]> = SmallVec::new();
        while let Some(x) = stack.pop() {
            if x == to {
                return true;
            }
            if seen.contains(&x) {
                continue;
            }
            seen.push(x);
            for (i, sub) in self.subs.iter().enumerate() {
                if sub.head != x {
                    continue;
                }
                let n = self.rules.rules()[sub.rule].vars.len();
                for slot in sub.base..sub.base + n {
                    match self.slots[slot] {
                        Some(y) if y != x && self.is_invented(y) && self.slot_owner[slot] == i => stack.push(y),
                        _ => {}
                    }
                }
            }
        }
        false
    }

    fn hypothesis(&self) -> Hypothesis {
        let mut program = Program::new();
        let mut metasubs = Vec::with_capacity(self.subs.len());
        for (i, sub) in self.subs.iter().enumerate() {
            let bindings = self.bindings_of(i);
            program.push(self.rules.rules()[sub.rule].instantiate(&bindings));
            metasubs.push((sub.rule, Metasubstitution { bindings }));
        }
        Hypothesis { metasubs, program }
    }
}

impl<'m> OpenResolver for MetaSearch<'m> {
    fn resolve_open<'a>(s: &mut Solver<'a, Self>, pred: PredRef, args: &[Term], k: &mut Cont<'_, 'a, Self>) -> Flow {
        match pred {
            PredRef::Open { slot, tag } => resolve_slot(s, slot as usize, tag, args, k),
            PredRef::Sym(sym) => meta_goal(s, sym, args, k),
        }
    }
}

fn resolve_slot<'a, 'm>(
    s: &mut Solver<'a, MetaSearch<'m>>,
    slot: usize,
    tag: u32,
    args: &[Term],
    k: &mut Cont<'_, 'a, MetaSearch<'m>>,
) -> Flow {
    if let Some(sym) = s.ext.slots[slot] {
        return s.solve_atom(PredRef::Sym(sym), args, k);
    }
    let owner = s.ext.subs[s.ext.slot_owner[slot]].head;
    let arity = args.len();
    let mut attempt = |s: &mut Solver<'a, MetaSearch<'m>>, c: SymId, fresh: bool| -> Flow {
        if tag & LEFT_GUARD != 0 && c == owner {
            return Flow::Continue;
        }
        if c != owner && s.ext.is_invented(c) && s.ext.is_invented(owner) && s.ext.reaches(c, owner) {
            return Flow::Continue;
        }
        s.ext.slots[slot] = Some(c);
        if fresh {
            s.ext.used_invented += 1;
        }
        let flow = s.solve_atom(PredRef::Sym(c), args, k);
        if fresh {
            s.ext.used_invented -= 1;
        }
        s.ext.slots[slot] = None;
        flow
    };
    let n = s.ext.by_arity.get(arity).map_or(0, Vec::len);
    for i in 0..n {
        let c = s.ext.by_arity[arity][i];
        let flow = attempt(s, c, false);
        if flow != Flow::Continue {
            return flow;
        }
    }
    if s.vocab.arity(s.ext.target) as usize == arity {
        let flow = attempt(s, s.ext.target, false);
        if flow != Flow::Continue {
            return flow;
        }
    }
    let used = s.ext.used_invented;
    for i in 0..used {
        let c = s.ext.invented[i];
        if s.vocab.arity(c) as usize == arity {
            let flow = attempt(s, c, false);
            if flow != Flow::Continue {
                return flow;
            }
        }
    }
    if let Some(&c) = s.ext.invented.get(used) {
        if s.vocab.arity(c) as usize == arity {
            return attempt(s, c, true);
        }
    }
    Flow::Continue
}

fn meta_goal<'a, 'm>(s: &mut Solver<'a, MetaSearch<'m>>, sym: SymId, args: &[Term], k: &mut Cont<'_, 'a, MetaSearch<'m>>) -> Flow {
    if !s.ext.is_meta(sym) {
        return Flow::Continue;
    }
    let (key, ground) = fingerprint(&s.bindings, args);
    let clash = |h: &Option<u64>| h.map_or(true, |h| h == key);
    if s.ext.ancestors.iter().any(|(a, h, a_args)| *a == sym && clash(h) && variant(&s.bindings, a_args, args)) {
        return Flow::Continue;
    }
    s.ext.ancestors.push((sym, ground.then_some(key), args.iter().cloned().collect()));
    let flow = expand(s, sym, args, k);
    s.ext.ancestors.pop();
    flow
}

fn expand<'a, 'm>(s: &mut Solver<'a, MetaSearch<'m>>, sym: SymId, args: &[Term], k: &mut Cont<'_, 'a, MetaSearch<'m>>) -> Flow {
    let mut done = |s: &mut Solver<'a, MetaSearch<'m>>| {
        let me = s.ext.ancestors.pop().expect("ancestor pushed by meta_goal");
        let flow = k(s);
        s.ext.ancestors.push(me);
        flow
    };
    let existing = s.ext.subs.len();
    for i in 0..existing {
        if s.ext.subs[i].head != sym {
            continue;
        }
        let flow = apply_sub(s, i, args, &mut done);
        if flow != Flow::Continue {
            return flow;
        }
    }
    if s.ext.subs.len() >= s.ext.max_size {
        return Flow::Continue;
    }
    let rules = s.ext.rules;
    for (r, rule) in rules.iter().enumerate() {
        if rule.head_arity() as usize != args.len() {
            continue;
        }
        let idx = s.ext.subs.len();
        let base = s.ext.slots.len();
        s.ext.subs.push(Sub { rule: r, head: sym, base });
        for v in 0..rule.vars.len() {
            s.ext.slots.push((v == rule.head.var).then_some(sym));
            s.ext.slot_owner.push(idx);
        }
        let flow = apply_sub(s, idx, args, &mut |s| if s.ext.duplicates(idx) { Flow::Continue } else { done(s) });
        s.ext.slots.truncate(base);
        s.ext.slot_owner.truncate(base);
        s.ext.subs.pop();
        if flow != Flow::Continue {
            return flow;
        }
    }
    Flow::Continue
}

fn apply_sub<'a, 'm>(s: &mut Solver<'a, MetaSearch<'m>>, i: usize, args: &[Term], k: &mut Cont<'_, 'a, MetaSearch<'m>>) -> Flow {
    let sub = s.ext.subs[i];
    let rule = &s.ext.rules.rules()[sub.rule];
    let mark = s.bindings.mark();
    let fo = s.bindings.fresh(rule.fo_var_count());
    let head_ok = rule.head.args.iter().zip(args).all(|(&v, a)| s.bindings.unify(&Term::Var(fo + v), a));
    let flow = if head_ok {
        let body: SmallVec<[Goal; 4]> = rule
            .body
            .iter()
            .enumerate()
            .map(|(li, l)| Goal {
                pred: PredRef::Open {
                    slot: (sub.base + l.var) as u32,
                    tag: if rule.is_left_guarded(li) { LEFT_GUARD } else { 0 },
                },
                args: l.args.iter().map(|&a| Term::Var(fo + a)).collect(),
            })
            .collect();
        s.solve_conj(&body, k)
    } else {
        Flow::Continue
    };
    s.bindings.undo(mark);
    flow
}

/// Hash that agrees on variants: variables hash by order of first occurrence.
/// Also reports whether the arguments are ground.
fn fingerprint(b: &Bindings, args: &[Term]) -> (u64, bool) {
    fn mix(h: u64, x: u64) -> u64 {
        (h.rotate_left(5) ^ x).wrapping_mul(0x51_7c_c1_b7_27_22_0a_95)
    }
    fn go(b: &Bindings, t: &Term, h: u64, seen: &mut SmallVec<[u32; 4]>) -> u64 {
        match b.deref(t) {
            Term::Var(v) => {
                let i = seen.iter().position(|w| w == v).unwrap_or_else(|| {
                    seen.push(*v);
                    seen.len() - 1
                });
                mix(mix(h, 1), i as u64)
            }
            Term::Int(n) => mix(mix(h, 2), *n as u64),
            Term::Const(c) => mix(mix(h, 3), c.id() as u64),
            Term::Struct(f, xs) => xs.iter().fold(mix(mix(mix(h, 4), f.id() as u64), xs.len() as u64), |h, x| go(b, x, h, seen)),
        }
    }
    let mut seen = SmallVec::new();
    let h = args.iter().fold(0, |h, a| go(b, a, h, &mut seen));
    (h, seen.is_empty())
}

fn is_ground_shallow(args: &[Term]) -> bool {
    args.iter().all(|a| matches!(a, Term::Int(_) | Term::Const(_)))
}

/// Equal up to a consistent renaming of unbound variables.
fn variant(b: &Bindings, xs: &[Term], ys: &[Term]) -> bool {
    fn go(b: &Bindings, x: &Term, y: &Term, map: &mut Vec<(u32, u32)>) -> bool {
        match (b.deref(x), b.deref(y)) {
            (Term::Var(u), Term::Var(v)) => match map.iter().find(|(a, c)| a == u || c == v) {
                Some(&(a, c)) => a == *u && c == *v,
                None => {
                    map.push((*u, *v));
                    true
                }
            },
            (Term::Int(a), Term::Int(c)) => a == c,
            (Term::Const(a), Term::Const(c)) => a == c,
            (Term::Struct(f, xa), Term::Struct(g, ya)) => {
                f == g
                    && xa.len() == ya.len()
                    && (std::sync::Arc::ptr_eq(xa, ya) && is_ground_shallow(xa)
                        || xa.iter().zip(ya.iter()).all(|(x, y)| go(b, x, y, map)))
            }
            _ => false,
        }
    }
    let mut map = Vec::new();
    xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| go(b, x, y, &mut map))
}

pub(crate) struct SearchRun<'r> {
    pub env: &'r Background<'r>,
    pub sig: &'r Signature,
    pub target: SymId,
    pub invented: &'r [SymId],
    pub max_size: usize,
    pub positives: &'r [Atom],
    pub negatives: &'r [Atom],
}

impl SearchRun<'_> {
    /// Runs one bounded search, handing each complete and consistent hypothesis to `visit`
    /// until it returns true. Returns the outcome and the updated step count.
    pub fn run(&self, limits: Limits, steps_before: u64, visit: &mut dyn FnMut(&Hypothesis) -> bool) -> (ProofOutcome, u64) {
        let env = self.env;
        let ext = MetaSearch::new(env.metarules, self.sig, self.target, self.invented, self.max_size, |s| env.vocab.arity(s));
        let mut solver = Solver::with_ext(env.vocab, env.bk, env.registry, limits, ext);
        solver.set_steps(steps_before);
        solver.reserve_vars(self.positives.iter().chain(self.negatives).map(|a| Clause::fact(a.clone()).var_span()).max().unwrap_or(0));
        let goals: Vec<Goal> = self.positives.iter().map(Goal::from_atom).collect();
        let negatives = self.negatives;
        let flow = solver.solve_conj(&goals, &mut |s| {
            let hyp = s.ext.hypothesis();
            if !negatives.is_empty() {
                let mut program = env.bk.clone();
                program.extend(hyp.program.clauses().iter().cloned());
                for neg in negatives {
                    let lim = Limits { max_steps: s.remaining_steps(), ..*s.limits() };
                    let r = prove(std::slice::from_ref(neg), &program, env.registry, env.vocab, lim);
                    if !s.charge(r.steps) {
                        return Flow::Abort;
                    }
                    if r.outcome != ProofOutcome::Refuted {
                        return Flow::Continue;
                    }
                }
            }
            if visit(&hyp) {
                Flow::Stop
            } else {
                Flow::Continue
            }
        });
        (solver.outcome(flow), solver.steps())
    }
}
