//! Task corpora and their line-oriented text form.
//!
//! ```text
//! % domain=robot seed=7 tasks=1
//! task t1 robot pos: t1(world(1,1,3,3,false),world(1,2,3,3,false)).
//! ```

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::domains::Domain;
use crate::logic::{parse_term, Term};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("duplicate task name `{0}`")]
    Duplicate(String),
    #[error("corpus has no tasks and no domain header")]
    NoDomain,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One task in vocabulary-independent form: example argument tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusTask {
    pub name: String,
    pub positives: Vec<Vec<Term>>,
    pub negatives: Vec<Vec<Term>>,
}

impl CorpusTask {
    pub fn one_shot(name: impl Into<String>, args: Vec<Term>) -> Self {
        CorpusTask { name: name.into(), positives: vec![args], negatives: Vec::new() }
    }

    pub fn arity(&self) -> usize {
        self.positives.first().map_or(0, Vec::len)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaskCorpus {
    pub domain: Domain,
    pub seed: Option<u64>,
    pub tasks: Vec<CorpusTask>,
}

impl TaskCorpus {
    pub fn new(domain: Domain, seed: Option<u64>, tasks: Vec<CorpusTask>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::new();
        for t in &tasks {
            if !seen.insert(t.name.as_str()) {
                return Err(CorpusError::Duplicate(t.name.clone()));
            }
        }
        Ok(TaskCorpus { domain, seed, tasks })
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("% domain={}", self.domain);
        if let Some(seed) = self.seed {
            let _ = write!(out, " seed={seed}");
        }
        let _ = writeln!(out, " tasks={}", self.tasks.len());
        for t in &self.tasks {
            let _ = write!(out, "task {} {}", t.name, self.domain);
            for (label, examples) in [("pos", &t.positives), ("neg", &t.negatives)] {
                for args in examples.iter() {
                    let args: Vec<String> = args.iter().map(Term::to_string).collect();
                    let _ = write!(out, " {label}: {}({}).", t.name, args.join(","));
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, CorpusError> {
        let mut domain = None;
        let mut seed = None;
        let mut tasks = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |msg: String| CorpusError::Line { line, msg };
            let l = raw.trim();
            if l.is_empty() {
                continue;
            }
            if let Some(comment) = l.strip_prefix('%') {
                for kv in comment.split_whitespace() {
                    match kv.split_once('=') {
                        Some(("domain", d)) => domain = Some(d.parse::<Domain>().map_err(err)?),
                        Some(("seed", s)) => seed = Some(s.parse::<u64>().map_err(|e| err(format!("seed: {e}")))?),
                        _ => {}
                    }
                }
                continue;
            }
            let (task, task_domain) = parse_task_line(l).map_err(err)?;
            match domain {
                None => domain = Some(task_domain),
                Some(d) if d != task_domain => return Err(err(format!("domain {task_domain} in a {d} corpus"))),
                _ => {}
            }
            if tasks.iter().any(|t: &CorpusTask| t.name == task.name) {
                return Err(err(format!("duplicate task name `{}`", task.name)));
            }
            tasks.push(task);
        }
        let domain = domain.ok_or(CorpusError::NoDomain)?;
        Ok(TaskCorpus { domain, seed, tasks })
    }

    pub fn read(path: &Path) -> Result<Self, CorpusError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<(), CorpusError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

fn parse_task_line(l: &str) -> Result<(CorpusTask, Domain), String> {
    let mut words = l.splitn(4, char::is_whitespace);
    if words.next() != Some("task") {
        return Err("expected `task <name> <domain> pos: <atom>.`".into());
    }
    let name = words.next().filter(|n| !n.is_empty()).ok_or("missing task name")?;
    if !name.starts_with(|c: char| c.is_ascii_lowercase()) || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(format!("bad task name `{name}`"));
    }
    let domain: Domain = words.next().ok_or("missing domain")?.parse()?;
    let rest = words.next().ok_or("missing examples")?.trim();
    let mut task = CorpusTask { name: name.to_owned(), positives: Vec::new(), negatives: Vec::new() };
    let mut cursor = rest;
    while !cursor.is_empty() {
        let (positive, after) = if let Some(a) = cursor.strip_prefix("pos:") {
            (true, a)
        } else if let Some(a) = cursor.strip_prefix("neg:") {
            (false, a)
        } else {
            return Err(format!("expected `pos:` or `neg:` at `{cursor}`"));
        };
        let end = after.find(" pos:").or_else(|| after.find(" neg:")).unwrap_or(after.len());
        let atom = after[..end].trim();
        let atom = atom.strip_suffix('.').ok_or("example must end with `.`")?;
        let term = parse_term(atom).map_err(|e| e.to_string())?;
        let args = match term {
            Term::Struct(f, args) if f.as_str() == name => args.to_vec(),
            _ => return Err(format!("example must be an atom over `{name}`")),
        };
        if args.iter().any(|a| !a.is_ground()) {
            return Err("examples must be ground".into());
        }
        if !(1..=2).contains(&args.len()) || task.positives.first().is_some_and(|p| p.len() != args.len()) {
            return Err("inconsistent example arity".into());
        }
        if positive {
            task.positives.push(args);
        } else {
            task.negatives.push(args);
        }
        cursor = after[end..].trim_start();
    }
    if task.positives.is_empty() {
        return Err("a task needs a positive example".into());
    }
    Ok((task, domain))
}
