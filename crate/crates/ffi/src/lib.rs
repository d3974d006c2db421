//! C ABI over `mil_core`.
//!
//! Every function returns a [`MilStatus`]. On failure a message is kept per
//! thread and can be read with [`mil_last_error`]. Handles are opaque and
//! must be released with their `_free` function. Strings handed out by the
//! library are released with [`mil_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Duration;

use mil_core::bounds;
use mil_core::corpus::TaskCorpus;
use mil_core::domains::Domain;
use mil_core::forgetting::ForgetStrategy;
use mil_core::harness::{run_corpus, Mode, RunConfig, RunSummary, TimeMean};
use mil_core::logic::{parse_program, PrimitiveRegistry, Program, SymbolKind, Vocabulary};
use mil_core::metarule::MetaruleSet;
use mil_core::mil::{metagol, Background, LearnOutcome, LearnTask, SearchConfig};
use mil_core::signature::Signature;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MilStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Io = 4,
    Parse = 5,
    /// The search ended without a program.
    NotFound = 6,
    /// The step cap or the deadline ran out.
    Timeout = 7,
    OutOfRange = 8,
    Internal = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MilStrategy {
    None = 0,
    Syntactical = 1,
    Statistical = 2,
    Single = 3,
}

impl From<MilStrategy> for Mode {
    fn from(s: MilStrategy) -> Mode {
        match s {
            MilStrategy::None => Mode::Multi(ForgetStrategy::None),
            MilStrategy::Syntactical => Mode::Multi(ForgetStrategy::Syntactical),
            MilStrategy::Statistical => Mode::Multi(ForgetStrategy::Statistical),
            MilStrategy::Single => Mode::Single,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct MilRunOptions {
    pub strategy: MilStrategy,
    /// Milliseconds per task per depth; 0 disables the wall-clock limit.
    pub timeout_ms: u64,
    /// Resolution steps per task per depth.
    pub step_cap: u64,
    pub max_size: u32,
    pub parallelism: u32,
}

/// Opaque task corpus.
pub struct MilCorpus(TaskCorpus);

/// Opaque result of learning a corpus.
pub struct MilRun {
    summary: RunSummary,
    domain: Domain,
    mode: Mode,
}

/// Opaque learner over user-supplied background facts and metarules.
pub struct MilSession {
    vocab: Vocabulary,
    registry: PrimitiveRegistry,
    bk: Program,
    sig: Signature,
    metarules: MetaruleSet,
    learned: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Fail(MilStatus, String);

impl Fail {
    fn new(status: MilStatus, msg: impl ToString) -> Self {
        Fail(status, msg.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> MilStatus {
    let (status, msg) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => (MilStatus::Ok, String::new()),
        Ok(Err(Fail(s, m))) => (s, m),
        Err(_) => (MilStatus::Internal, "internal panic".to_owned()),
    };
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg.replace('\0', " ")).unwrap_or_default());
    status
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::new(MilStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::new(MilStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail::new(MilStatus::NullPointer, format!("{what} is null")))
}

unsafe fn get_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| Fail::new(MilStatus::NullPointer, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::new(MilStatus::NullPointer, "output pointer is null"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::new(MilStatus::NullPointer, "output pointer is null"));
    }
    *out = CString::new(s).map_err(|e| Fail::new(MilStatus::Internal, e))?.into_raw();
    Ok(())
}

unsafe fn put_value<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::new(MilStatus::NullPointer, "output pointer is null"));
    }
    *out = value;
    Ok(())
}

/// Message for the last failing call on this thread. Empty after a success.
/// Valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn mil_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mil_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub extern "C" fn mil_run_options_default() -> MilRunOptions {
    let d = RunConfig::default();
    MilRunOptions {
        strategy: MilStrategy::Syntactical,
        timeout_ms: d.timeout.map_or(0, |t| t.as_millis() as u64),
        step_cap: d.step_cap,
        max_size: d.max_d as u32,
        parallelism: 1,
    }
}

/// # Safety
/// `domain` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn mil_corpus_generate(domain: *const c_char, tasks: usize, seed: u64, out: *mut *mut MilCorpus) -> MilStatus {
    guard(|| {
        let domain: Domain = text(domain, "domain")?.parse().map_err(|e| Fail::new(MilStatus::InvalidArgument, e))?;
        if tasks == 0 {
            return Err(Fail::new(MilStatus::InvalidArgument, "a corpus needs at least one task"));
        }
        put(out, MilCorpus(domain.gen_tasks(tasks, seed)))
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn mil_corpus_load(path: *const c_char, out: *mut *mut MilCorpus) -> MilStatus {
    guard(|| {
        let path = text(path, "path")?;
        let text = std::fs::read_to_string(path).map_err(|e| Fail::new(MilStatus::Io, format!("{path}: {e}")))?;
        let corpus = TaskCorpus::parse(&text).map_err(|e| Fail::new(MilStatus::Parse, e))?;
        put(out, MilCorpus(corpus))
    })
}

/// # Safety
/// `corpus` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn mil_corpus_save(corpus: *const MilCorpus, path: *const c_char) -> MilStatus {
    guard(|| {
        let corpus = get(corpus, "corpus")?;
        let path = text(path, "path")?;
        corpus.0.write(Path::new(path)).map_err(|e| Fail::new(MilStatus::Io, e))
    })
}

/// # Safety
/// `corpus` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn mil_corpus_len(corpus: *const MilCorpus, out: *mut usize) -> MilStatus {
    guard(|| put_value(out, get(corpus, "corpus")?.0.len()))
}

/// Serialized corpus; release with `mil_string_free`.
///
/// # Safety
/// `corpus` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn mil_corpus_to_text(corpus: *const MilCorpus, out: *mut *mut c_char) -> MilStatus {
    guard(|| put_string(out, get(corpus, "corpus")?.0.to_text()))
}

/// # Safety
/// `corpus` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mil_corpus_free(corpus: *mut MilCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

/// Learns every task of the corpus.
///
/// # Safety
/// `corpus` must be a live handle, `options` null or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mil_corpus_learn(corpus: *const MilCorpus, options: *const MilRunOptions, out: *mut *mut MilRun) -> MilStatus {
    guard(|| {
        let corpus = &get(corpus, "corpus")?.0;
        let o = options.as_ref().copied().unwrap_or_else(|| mil_run_options_default());
        if o.max_size == 0 || o.parallelism == 0 || o.step_cap == 0 {
            return Err(Fail::new(MilStatus::InvalidArgument, "max_size, parallelism and step_cap must be positive"));
        }
        let cfg = RunConfig {
            timeout: (o.timeout_ms > 0).then(|| Duration::from_millis(o.timeout_ms)),
            step_cap: o.step_cap,
            max_d: o.max_size as usize,
            parallelism: o.parallelism as usize,
            time_mean: TimeMean::AllTasks,
        };
        let mode = Mode::from(o.strategy);
        let summary = run_corpus(corpus, mode, &cfg).map_err(|e| Fail::new(MilStatus::Internal, e))?;
        put(out, MilRun { summary, domain: corpus.domain, mode })
    })
}

/// # Safety
/// `run` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn mil_run_solved(run: *const MilRun, out: *mut usize) -> MilStatus {
    guard(|| put_value(out, get(run, "run")?.summary.n_solved()))
}

/// The program learned for task `index`, or `MIL_STATUS_NOT_FOUND` when the task is unsolved.
///
/// # Safety
/// `run` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn mil_run_program(run: *const MilRun, index: usize, out: *mut *mut c_char) -> MilStatus {
    guard(|| {
        let run = get(run, "run")?;
        match run.summary.programs.get(index) {
            None => Err(Fail::new(MilStatus::OutOfRange, format!("task index {index} out of range"))),
            Some(None) => Err(Fail::new(MilStatus::NotFound, format!("task {index} is unsolved"))),
            Some(Some(p)) => put_string(out, p.clone()),
        }
    })
}

/// The run as one CSV line (no header, no newline).
///
/// # Safety
/// `run` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn mil_run_csv_row(run: *const MilRun, out: *mut *mut c_char) -> MilStatus {
    guard(|| {
        let run = get(run, "run")?;
        let row = run.summary.row(run.domain, run.mode, 0, TimeMean::AllTasks);
        let mut buf = Vec::new();
        mil_core::harness::write_csv(&[row], &mut buf).map_err(|e| Fail::new(MilStatus::Internal, e))?;
        let s = String::from_utf8(buf).map_err(|e| Fail::new(MilStatus::Internal, e))?;
        put_string(out, s.lines().nth(1).unwrap_or_default().to_owned())
    })
}

/// # Safety
/// `run` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mil_run_free(run: *mut MilRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// A learner with the standard metarules and an empty background.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn mil_session_new(out: *mut *mut MilSession) -> MilStatus {
    guard(|| {
        put(
            out,
            MilSession {
                vocab: Vocabulary::new(),
                registry: PrimitiveRegistry::new(),
                bk: Program::new(),
                sig: Signature::new(),
                metarules: MetaruleSet::standard(),
                learned: 0,
            },
        )
    })
}

/// Adds background clauses. Predicates defined only by ground facts become
/// extensional tables; the rest are kept as rules.
///
/// # Safety
/// `session` must be a live handle and `clauses` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn mil_session_add_background(session: *mut MilSession, clauses: *const c_char) -> MilStatus {
    guard(|| {
        let s = get_mut(session, "session")?;
        let src = text(clauses, "clauses")?;
        let mut vocab = s.vocab.clone();
        let program = parse_program(src, &mut vocab, SymbolKind::Fact).map_err(|e| Fail::new(MilStatus::Parse, e))?;
        for h in program.heads() {
            let name = vocab.name(h);
            if vocab.kind(h) != SymbolKind::Fact {
                return Err(Fail::new(MilStatus::InvalidArgument, format!("`{name}` is not a background predicate")));
            }
            let tabular = program.definition(h).all(|c| c.body.is_empty() && c.head.is_ground());
            if (s.registry.contains(h) && !tabular) || (s.bk.defines(h) && tabular) {
                return Err(Fail::new(MilStatus::InvalidArgument, format!("`{name}` mixes facts and rules")));
            }
        }
        s.vocab = vocab;
        let heads = program.heads();
        for h in heads {
            let defs: Vec<_> = program.definition(h).collect();
            let tabular = defs.iter().all(|c| c.body.is_empty() && c.head.is_ground()) && !s.bk.defines(h);
            if tabular {
                s.registry.add_facts(h, defs.iter().map(|c| c.head.args.clone()));
            } else {
                s.bk.extend(defs.into_iter().cloned());
            }
            s.sig.push(h);
        }
        Ok(())
    })
}

/// Replaces the metarules, one per line, e.g. `chain: P(A,B) :- Q(A,C), R(C,B).`
///
/// # Safety
/// `session` must be a live handle and `metarules` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn mil_session_set_metarules(session: *mut MilSession, metarules: *const c_char) -> MilStatus {
    guard(|| {
        let s = get_mut(session, "session")?;
        s.metarules = MetaruleSet::parse(text(metarules, "metarules")?).map_err(|e| Fail::new(MilStatus::Parse, e))?;
        Ok(())
    })
}

/// Learns a program for the predicate named in the examples. Both arguments
/// are sequences of ground atoms ending in `.`; `negatives` may be null.
/// With `keep` nonzero the program joins the background, so later tasks
/// may call it.
///
/// # Safety
/// `session` must be a live handle, the strings NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mil_session_learn(
    session: *mut MilSession,
    positives: *const c_char,
    negatives: *const c_char,
    max_size: u32,
    step_cap: u64,
    keep: bool,
    out: *mut *mut c_char,
) -> MilStatus {
    guard(|| {
        let s = get_mut(session, "session")?;
        if out.is_null() {
            return Err(Fail::new(MilStatus::NullPointer, "output pointer is null"));
        }
        if max_size == 0 || step_cap == 0 {
            return Err(Fail::new(MilStatus::InvalidArgument, "max_size and step_cap must be positive"));
        }
        let pos_src = text(positives, "positives")?;
        let neg_src = if negatives.is_null() { "" } else { text(negatives, "negatives")? };
        let mut vocab = s.vocab.clone();
        let pos = parse_program(pos_src, &mut vocab, SymbolKind::Target).map_err(|e| Fail::new(MilStatus::Parse, e))?;
        let neg = parse_program(neg_src, &mut vocab, SymbolKind::Target).map_err(|e| Fail::new(MilStatus::Parse, e))?;
        let atoms = |p: &Program| -> Result<Vec<_>, Fail> {
            p.clauses()
                .iter()
                .map(|c| if c.body.is_empty() { Ok(c.head.clone()) } else { Err(Fail::new(MilStatus::Parse, "examples must be atoms")) })
                .collect()
        };
        let (pos, neg) = (atoms(&pos)?, atoms(&neg)?);
        let target = pos.first().ok_or_else(|| Fail::new(MilStatus::InvalidArgument, "no positive examples"))?.pred;
        if vocab.kind(target) != SymbolKind::Target {
            return Err(Fail::new(MilStatus::InvalidArgument, format!("`{}` is already a background predicate", vocab.name(target))));
        }
        if vocab.invented_for(target, max_size as usize - 1).is_none() {
            vocab.declare_invented(target, max_size as usize - 1).map_err(|e| Fail::new(MilStatus::InvalidArgument, e))?;
        }
        let task = LearnTask::new(target, pos, neg).map_err(|e| Fail::new(MilStatus::InvalidArgument, e))?;
        let env = Background { vocab: &vocab, registry: &s.registry, metarules: &s.metarules, bk: &s.bk };
        let cfg = SearchConfig { max_size: max_size as usize, step_cap, timeout: None, ..SearchConfig::default() };
        let result = metagol(&env, &s.sig, &task, &cfg).map_err(|e| Fail::new(MilStatus::InvalidArgument, e))?;
        match result.outcome {
            LearnOutcome::Solved(program) => {
                let shown = program.display(&vocab).to_string();
                if keep {
                    for h in program.heads() {
                        s.sig.push(h);
                    }
                    s.bk.extend(program.clauses().iter().cloned());
                    s.learned += 1;
                }
                s.vocab = vocab;
                put_string(out, shown)
            }
            LearnOutcome::NotFound => Err(Fail::new(MilStatus::NotFound, "no program within the size bound")),
            LearnOutcome::Timeout => Err(Fail::new(MilStatus::Timeout, "search budget exhausted")),
        }
    })
}

/// Number of programs kept in the background so far.
///
/// # Safety
/// `session` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn mil_session_learned(session: *const MilSession, out: *mut usize) -> MilStatus {
    guard(|| put_value(out, get(session, "session")?.learned))
}

/// # Safety
/// `session` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mil_session_free(session: *mut MilSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Size of the hypothesis space as a decimal string.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn mil_hspace_size(m: u64, p: u64, j: u32, n: u32, out: *mut *mut c_char) -> MilStatus {
    guard(|| put_string(out, bounds::hspace_size(m, p, j, n).to_string()))
}

/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn mil_sample_complexity(m: u64, p: u64, j: u32, n: u32, eps: f64, delta: f64, out: *mut f64) -> MilStatus {
    guard(|| {
        if m == 0 || p == 0 || !(eps > 0.0 && eps < 1.0 && delta > 0.0 && delta < 1.0) {
            return Err(Fail::new(MilStatus::InvalidArgument, "need m, p >= 1 and eps, delta in (0, 1)"));
        }
        put_value(out, bounds::sample_complexity(m, p, j, n, eps, delta))
    })
}

