use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use mil_core::corpus::{CorpusError, TaskCorpus};
use mil_core::domains::{Domain, World};
use mil_core::forgetting::ForgetStrategy;
use mil_core::harness::{corpus_seed, run_corpus, run_experiment, write_csv, ExperimentConfig, Mode, RunConfig, CSV_HEADER};
use mil_core::logic::Program;
use mil_core::metarule::MetaruleSet;
use mil_core::mil::{metagol, Background, SearchConfig};

fn mil(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mil")).args(args).output().expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Every column except the two timing ones.
fn counts(csv: &str) -> Vec<String> {
    csv.lines()
        .map(|l| {
            let cols: Vec<&str> = l.split(',').collect();
            [&cols[..5], &cols[7..]].concat().join(",")
        })
        .collect()
}

#[test]
fn corpus_round_trip_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("robot.txt");
    let out = mil(&["gen", "--domain", "robot", "--tasks", "100", "--seed", "42", "--out", path(&file)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&file).unwrap();
    let corpus = TaskCorpus::parse(&text).unwrap();
    assert_eq!(corpus, Domain::Robot.gen_tasks(100, 42));
    assert_eq!(corpus.to_text(), text);
    let again = dir.path().join("again.txt");
    corpus.write(&again).unwrap();
    assert_eq!(std::fs::read(&again).unwrap(), text.as_bytes());
}

#[test]
fn corrupted_line_is_reported_by_number() {
    let mut lines: Vec<String> = Domain::Lego.gen_tasks(10, 1).to_text().lines().map(str::to_owned).collect();
    lines[6] = "task t6 lego pos: t6(lego(1,[0,0,0,0,0,0]),".to_owned();
    let text = lines.join("\n");
    match TaskCorpus::parse(&text) {
        Err(CorpusError::Line { line, .. }) => assert_eq!(line, 7),
        other => panic!("expected a line error, got {other:?}"),
    }
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.txt");
    std::fs::write(&file, text).unwrap();
    let out = mil(&["run", "--corpus", path(&file), "--out", path(&dir.path().join("r.csv"))]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 7"));
}

#[test]
fn run_writes_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("up.txt");
    std::fs::write(&corpus, "task f robot pos: f(world(1,1,3,3,false),world(1,2,3,3,false)).\n").unwrap();
    let csv = dir.path().join("up.csv");
    let out = mil(&["run", "--corpus", path(&corpus), "--strategy", "none", "--timeout", "0", "--out", path(&csv), "--show"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("f(A,B) :- up(A,B)."));
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], CSV_HEADER);
    assert_eq!(rows.len(), 2);
    let cols: Vec<&str> = rows[1].split(',').collect();
    assert_eq!(&cols[..5], ["robot", "none", "1", "0", "100.0"]);
    assert_eq!(&cols[7..], ["1", "7", "0"]);
}

#[test]
fn bench_is_deterministic_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let csv = |name: &str| {
        let file = dir.path().join(name);
        let args = [
            "bench", "--domain", "robot", "--counts", "6,10", "--reps", "2", "--seed", "3", "--timeout", "0", "--step-cap", "20000",
            "--max-size", "3", "--out", path(&file),
        ];
        let out = mil(&args);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read_to_string(&file).unwrap()
    };
    let (a, b) = (csv("a.csv"), csv("b.csv"));
    assert_eq!(a.lines().count(), 1 + 2 * 2 * 4);
    assert_eq!(counts(&a), counts(&b));
}

#[test]
fn bounds_prints_the_space() {
    let out = mil(&["bounds", "--m", "4", "--p", "6", "--j", "2", "--n", "1", "--r", "0.5", "--k", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("hypothesis space  864"), "{text}");
    assert!(text.contains("forget            864"), "{text}");
}

#[test]
fn bad_input_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = |name: &str| dir.path().join(name).to_str().unwrap().to_owned();
    for args in [
        vec!["gen", "--domain", "robot", "--tasks", "0", "--out", &out("x")],
        vec!["gen", "--domain", "chess", "--tasks", "3", "--out", &out("x")],
        vec!["gen", "--domain", "robot", "--tasks", "3", "--out", "/nonexistent/dir/x"],
        vec!["run", "--corpus", "/nonexistent/corpus", "--out", &out("y")],
        vec!["bench", "--domain", "robot", "--counts", "10,5", "--out", &out("z")],
        vec!["bench", "--domain", "robot", "--strategies", "greedy", "--out", &out("z")],
        vec!["bounds", "--m", "0", "--p", "1", "--j", "2", "--n", "1"],
        vec!["bounds", "--m", "4", "--p", "6", "--j", "2", "--n", "1", "--eps", "2"],
    ] {
        assert!(!mil(&args).status.success(), "{args:?}");
    }
}

#[test]
fn empty_rows_give_a_header_only_file() {
    let mut buf = Vec::new();
    write_csv(&[], &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\n"));
}

#[test]
fn strategies_see_the_same_corpus() {
    let cfg = ExperimentConfig {
        counts: vec![5],
        reps: 2,
        modes: vec![Mode::Multi(ForgetStrategy::None), Mode::Single],
        run: RunConfig { timeout: None, step_cap: 20_000, max_d: 2, ..RunConfig::default() },
        ..ExperimentConfig::desk(Domain::Robot, 9)
    };
    let mut seen = Vec::new();
    let rows = run_experiment(&cfg, |r| seen.push((r.strategy.clone(), r.rep))).unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(seen, [("none".to_owned(), 0), ("single".to_owned(), 0), ("none".to_owned(), 1), ("single".to_owned(), 1)]);
    assert_ne!(corpus_seed(9, 5, 0), corpus_seed(9, 5, 1));
    // Depth 1 is the same search in both modes, so a size-1 budget must agree.
    let corpus = Domain::Robot.gen_tasks(20, corpus_seed(9, 20, 0));
    let one = RunConfig { timeout: None, step_cap: 20_000, max_d: 1, ..RunConfig::default() };
    let multi = run_corpus(&corpus, Mode::Multi(ForgetStrategy::None), &one).unwrap();
    let single = run_corpus(&corpus, Mode::Single, &one).unwrap();
    assert_eq!(multi.solved, single.solved);
}

#[test]
fn solved_share_grows_with_depth() {
    let corpus = Domain::Robot.gen_tasks(20, 5);
    let mut last = 0;
    for max_d in 1..=3 {
        let cfg = RunConfig { timeout: None, step_cap: 30_000, max_d, ..RunConfig::default() };
        let n = run_corpus(&corpus, Mode::Multi(ForgetStrategy::None), &cfg).unwrap().n_solved();
        assert!(n >= last, "max_d={max_d}: {n} < {last}");
        last = n;
    }
}

#[test]
fn deadline_is_enforced() {
    let corpus = Domain::Robot.gen_tasks(40, 77);
    let mut w = World::new(Domain::Robot);
    let tasks = w.declare_tasks(&corpus, 5).unwrap();
    let rules = MetaruleSet::standard();
    let bk = Program::new();
    let env = Background { vocab: &w.vocab, registry: &w.registry, metarules: &rules, bk: &bk };
    let timeout = Duration::from_millis(250);
    let cfg = SearchConfig { max_size: 6, timeout: Some(timeout), step_cap: u64::MAX, ..SearchConfig::default() };
    for t in tasks.iter().take(8) {
        let start = Instant::now();
        metagol(&env, &w.signature(), t, &cfg).unwrap();
        assert!(start.elapsed() <= timeout + Duration::from_millis(200), "{:?}", start.elapsed());
    }
}
