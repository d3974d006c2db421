use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use mil_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(mil_last_error()) }.to_str().unwrap().to_owned()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    mil_string_free(s);
    out
}

#[test]
fn session_learns_grandparent() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(mil_session_new(&mut s), MilStatus::Ok);
        let bk = c("parent(ann,bob).\nparent(bob,carl).\n");
        assert_eq!(mil_session_add_background(s, bk.as_ptr()), MilStatus::Ok);
        let mut out = ptr::null_mut();
        let pos = c("grandparent(ann,carl).");
        assert_eq!(mil_session_learn(s, pos.as_ptr(), ptr::null(), 3, 100_000, true, &mut out), MilStatus::Ok);
        assert_eq!(take(out), "grandparent(A,B) :- parent(A,C),parent(C,B).\n");
        let mut n = 0;
        assert_eq!(mil_session_learned(s, &mut n), MilStatus::Ok);
        assert_eq!(n, 1);

        let pos = c("ggp(ann,carl).");
        let neg = c("ggp(ann,bob).");
        assert_eq!(mil_session_learn(s, pos.as_ptr(), neg.as_ptr(), 1, 100_000, false, &mut out), MilStatus::Ok);
        assert_eq!(take(out), "ggp(A,B) :- grandparent(A,B).\n");
        mil_session_free(s);
    }
}

#[test]
fn session_reports_not_found_and_parse_errors() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(mil_session_new(&mut s), MilStatus::Ok);
        let bk = c("edge(a,b).");
        assert_eq!(mil_session_add_background(s, bk.as_ptr()), MilStatus::Ok);
        let mut out = ptr::null_mut();
        let pos = c("f(b,a).");
        assert_eq!(mil_session_learn(s, pos.as_ptr(), ptr::null(), 2, 100_000, false, &mut out), MilStatus::NotFound);
        assert!(out.is_null());
        let bad = c("edge(a,");
        assert_eq!(mil_session_add_background(s, bad.as_ptr()), MilStatus::Parse);
        assert!(!last_error().is_empty());
        let rules = c("bogus");
        assert_eq!(mil_session_set_metarules(s, rules.as_ptr()), MilStatus::Parse);
        let rules = c("ident: P(A,B) :- Q(A,B).");
        assert_eq!(mil_session_set_metarules(s, rules.as_ptr()), MilStatus::Ok);
        assert_eq!(last_error(), "");
        mil_session_free(s);
    }
}

#[test]
fn null_arguments_are_rejected() {
    unsafe {
        assert_eq!(mil_session_new(ptr::null_mut()), MilStatus::NullPointer);
        let mut n = 0;
        assert_eq!(mil_corpus_len(ptr::null(), &mut n), MilStatus::NullPointer);
        assert_eq!(mil_corpus_generate(ptr::null(), 3, 0, ptr::null_mut()), MilStatus::NullPointer);
        let mut corpus = ptr::null_mut();
        let d = c("chess");
        assert_eq!(mil_corpus_generate(d.as_ptr(), 3, 0, &mut corpus), MilStatus::InvalidArgument);
        assert!(last_error().contains("chess"));
        mil_string_free(ptr::null_mut());
        mil_corpus_free(ptr::null_mut());
        mil_run_free(ptr::null_mut());
        mil_session_free(ptr::null_mut());
    }
}

#[test]
fn corpus_round_trip_and_learning() {
    let dir = tempfile::tempdir().unwrap();
    let path = c(dir.path().join("c.txt").to_str().unwrap());
    unsafe {
        let mut corpus = ptr::null_mut();
        let d = c("robot");
        assert_eq!(mil_corpus_generate(d.as_ptr(), 4, 9, &mut corpus), MilStatus::Ok);
        assert_eq!(mil_corpus_save(corpus, path.as_ptr()), MilStatus::Ok);
        let mut loaded = ptr::null_mut();
        assert_eq!(mil_corpus_load(path.as_ptr(), &mut loaded), MilStatus::Ok);
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(mil_corpus_to_text(corpus, &mut a), MilStatus::Ok);
        assert_eq!(mil_corpus_to_text(loaded, &mut b), MilStatus::Ok);
        assert_eq!(take(a), take(b));
        let mut n = 0;
        assert_eq!(mil_corpus_len(loaded, &mut n), MilStatus::Ok);
        assert_eq!(n, 4);

        let mut opts = mil_run_options_default();
        opts.max_size = 2;
        opts.step_cap = 20_000;
        opts.timeout_ms = 0;
        let mut run = ptr::null_mut();
        assert_eq!(mil_corpus_learn(loaded, &opts, &mut run), MilStatus::Ok);
        let mut solved = 0;
        assert_eq!(mil_run_solved(run, &mut solved), MilStatus::Ok);
        let mut row = ptr::null_mut();
        assert_eq!(mil_run_csv_row(run, &mut row), MilStatus::Ok);
        let row = take(row);
        assert!(row.starts_with("robot,syn,4,0,"), "{row}");
        let mut prog = ptr::null_mut();
        assert_eq!(mil_run_program(run, 99, &mut prog), MilStatus::OutOfRange);
        for i in 0..4 {
            match mil_run_program(run, i, &mut prog) {
                MilStatus::Ok => assert!(take(prog).contains(":-")),
                status => assert_eq!(status, MilStatus::NotFound),
            }
        }
        mil_run_free(run);
        mil_corpus_free(corpus);
        mil_corpus_free(loaded);

        let missing = c(dir.path().join("missing.txt").to_str().unwrap());
        assert_eq!(mil_corpus_load(missing.as_ptr(), &mut loaded), MilStatus::Io);
    }
}

#[test]
fn bounds_through_the_abi() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(mil_hspace_size(1, 2, 2, 1, &mut s), MilStatus::Ok);
        assert_eq!(take(s), "8");
        let mut x = 0.0;
        assert_eq!(mil_sample_complexity(4, 6, 2, 2, 0.1, 0.05, &mut x), MilStatus::Ok);
        let expect = (2.0 * 4f64.ln() + 6.0 * 6f64.ln() + 20f64.ln()) / 0.1;
        assert!((x - expect).abs() < 1e-9 * expect);
        assert_eq!(mil_sample_complexity(4, 6, 2, 2, 0.0, 0.05, &mut x), MilStatus::InvalidArgument);
    }
}

#[test]
fn header_is_current_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/mil.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["mil_session_learn", "mil_corpus_generate", "mil_last_error", "MIL_STATUS_TIMEOUT", "MilRunOptions"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(&src, "#include \"mil.h\"\nint main(void) { MilRunOptions o = mil_run_options_default(); return (int)o.strategy; }\n").unwrap();
    match Command::new("cc").arg("-fsyntax-only").arg("-Wall").arg("-Werror").arg("-I").arg(header.parent().unwrap()).arg(&src).status() {
        Ok(status) => assert!(status.success(), "header does not compile"),
        Err(_) => eprintln!("no C compiler; syntax check skipped"),
    }
}
