use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const SAT: &str = "p cnf 2 2\n1 2 0\n-1 2 0\n";
const UNSAT: &str = "p cnf 1 2\n1 0\n-1 0\n";
const GOOD: &str = "1 | 1 | ax 1\n2 | -1 | ax 2\n3 | | res 1 2 1\n";
const BAD: &str = "1 | 1 | ax 1\n2 | -1 | ax 2\n3 | | res 1 1 1\n";

fn refgap(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_refgap"))
        .current_dir(dir)
        .env_remove("REFGAP_SEED")
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report on stdout")
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("sat.cnf"), SAT).unwrap();
    fs::write(dir.path().join("unsat.cnf"), UNSAT).unwrap();
    fs::write(dir.path().join("good.rtrace"), GOOD).unwrap();
    fs::write(dir.path().join("bad.rtrace"), BAD).unwrap();
    dir
}

#[test]
fn check_proof_exit_codes() {
    let dir = setup();
    let d = dir.path();
    let ok = refgap(d, &["check-proof", "--cnf", "unsat.cnf", "--proof", "good.rtrace", "--refutation"]);
    assert_eq!(ok.status.code(), Some(0));
    let r = report(&ok);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["subcommand"], "check-proof");
    assert_eq!(r["outcome"]["accepted"], true);

    let bad = refgap(d, &["check-proof", "--cnf", "unsat.cnf", "--proof", "bad.rtrace", "--refutation"]);
    assert_eq!(bad.status.code(), Some(1));
    let r = report(&bad);
    assert_eq!(r["outcome"]["line"], 3);
    assert!(r["outcome"]["reason"].is_string());

    assert_eq!(refgap(d, &["check-proof", "--frobnicate"]).status.code(), Some(2));
    assert_eq!(refgap(d, &["check-proof", "--cnf", "missing.cnf", "--proof", "good.rtrace"]).status.code(), Some(2));
    fs::write(d.join("junk.cnf"), "p cnf x\n").unwrap();
    assert_eq!(refgap(d, &["check-proof", "--cnf", "junk.cnf", "--proof", "good.rtrace"]).status.code(), Some(2));
}

#[test]
fn solve_witness_check() {
    let dir = setup();
    let d = dir.path();
    let out = refgap(d, &["solve", "--cnf", "sat.cnf", "--model", "m.assign"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["outcome"]["result"], "sat");
    assert_eq!(refgap(d, &["solve", "--cnf", "unsat.cnf"]).status.code(), Some(1));

    let out = refgap(d, &["witness", "--cnf", "sat.cnf", "--model", "m.assign", "-s", "4", "-o", "w.rtrace"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["outcome"]["resolvents"], r["outcome"]["cut_count"]);
    assert_eq!(r["outcome"]["a0_lines"], 8);

    let enc = refgap(d, &["encode", "rref", "--cnf", "sat.cnf", "-s", "4", "-o", "g.cnf", "--map", "g.map", "--tags", "g.tags"]);
    assert_eq!(enc.status.code(), Some(0));
    assert_eq!(report(&enc)["outcome"]["max_index_width"], 2);
    let tags = fs::read_to_string(d.join("g.tags")).unwrap();
    assert!(tags.contains("A7"));
    let check = refgap(d, &["check-proof", "--cnf", "g.cnf", "--proof", "w.rtrace", "--refutation"]);
    assert_eq!(check.status.code(), Some(0));

    let prime = refgap(d, &["encode", "rref-prime", "--cnf", "sat.cnf", "-s", "4", "-o", "h.cnf", "--tags", "h.tags"]);
    assert_eq!(prime.status.code(), Some(0));
    let tags = fs::read_to_string(d.join("h.tags")).unwrap();
    assert!(!tags.lines().any(|l| l.ends_with(" A7") || l.ends_with(" A8")));
}

#[test]
fn fulltree_and_structures() {
    let dir = setup();
    let d = dir.path();
    let out = refgap(d, &["fulltree", "--cnf", "unsat.cnf", "-o", "t.struct", "--proof", "t.rtrace"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["outcome"]["length"], 3);
    assert_eq!(refgap(d, &["check-struct", "--cnf", "unsat.cnf", "--struct", "t.struct"]).status.code(), Some(0));
    let check = refgap(d, &["check-proof", "--cnf", "unsat.cnf", "--proof", "t.rtrace", "--refutation"]);
    assert_eq!(check.status.code(), Some(0));
    assert_eq!(refgap(d, &["fulltree", "--cnf", "sat.cnf", "-o", "x.struct"]).status.code(), Some(1));
}

#[test]
fn reduce_is_deterministic() {
    let dir = setup();
    let d = dir.path();
    for o in ["a", "b"] {
        let out = refgap(
            d,
            &["reduce", "--cnf", "unsat.cnf", "-o", &format!("{o}.cnf"), "--map", &format!("{o}.map"), "--params", &format!("{o}.json")],
        );
        assert_eq!(out.status.code(), Some(0));
    }
    for ext in ["cnf", "map", "json"] {
        assert_eq!(fs::read(d.join(format!("a.{ext}"))).unwrap(), fs::read(d.join(format!("b.{ext}"))).unwrap());
    }
    let params: Value = serde_json::from_str(&fs::read_to_string(d.join("a.json")).unwrap()).unwrap();
    assert_eq!(params["s"], 13);
    fs::write(d.join("wide.cnf"), "p cnf 4 1\n1 2 3 4 0\n").unwrap();
    assert_eq!(refgap(d, &["reduce", "--cnf", "wide.cnf", "-o", "w.cnf"]).status.code(), Some(2));
}

#[test]
fn decide_with_searchers() {
    let dir = setup();
    let d = dir.path();
    let sat = refgap(d, &["decide", "--cnf", "sat.cnf", "--searcher", "witness", "--budget", "100"]);
    assert_eq!(sat.status.code(), Some(0));
    assert_eq!(report(&sat)["outcome"]["decision"], "satisfiable");
    let unsat = refgap(d, &["decide", "--cnf", "unsat.cnf"]);
    assert_eq!(unsat.status.code(), Some(1));
    assert_eq!(report(&unsat)["outcome"]["decision"], "unsatisfiable");

    let timeout = refgap(d, &["decide", "--cnf", "sat.cnf", "--searcher", "external:false"]);
    assert_eq!(report(&timeout)["outcome"]["decision"], "unsatisfiable");
    let liar = d.join("liar.sh");
    fs::write(&liar, "#!/bin/sh\nprintf '1 | | ax 1\\n' > \"$2\"\n").unwrap();
    let fault = refgap(d, &["decide", "--cnf", "sat.cnf", "--searcher", &format!("external:sh {}", liar.display())]);
    assert_eq!(fault.status.code(), Some(2));
    assert_eq!(refgap(d, &["decide", "--cnf", "sat.cnf", "--searcher", "oracle"]).status.code(), Some(2));
}

#[test]
fn restrict_is_seeded() {
    let dir = setup();
    let d = dir.path();
    refgap(d, &["solve", "--cnf", "sat.cnf", "--model", "m.assign"]);
    refgap(d, &["witness", "--cnf", "sat.cnf", "--model", "m.assign", "-s", "8", "-o", "w.rtrace"]);
    let a = refgap(d, &["restrict", "--cnf", "sat.cnf", "-t", "8", "--seed", "5", "--proof", "w.rtrace", "-o", "ra"]);
    let b = Command::new(env!("CARGO_BIN_EXE_refgap"))
        .current_dir(d)
        .env("REFGAP_SEED", "5")
        .args(["restrict", "--cnf", "sat.cnf", "-t", "8", "--proof", "w.rtrace", "-o", "rb"])
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    assert_eq!(fs::read(d.join("ra/restriction.txt")).unwrap(), fs::read(d.join("rb/restriction.txt")).unwrap());
    let r = report(&a);
    assert_eq!(r["parameters"]["seed"], 5);
    if r["outcome"]["p_t"] == true {
        assert_eq!(r["outcome"]["reindexed"]["check"]["accepted"], true);
    }
}

#[test]
fn claims_and_report_file() {
    let dir = setup();
    let d = dir.path();
    let out = refgap(d, &["claims", "--n", "5", "--w", "1", "-s", "30", "--trials", "20", "--seed", "2", "--report", "c.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&fs::read_to_string(d.join("c.json")).unwrap()).unwrap();
    assert_eq!(r["ok"], true);
    assert_eq!(r["outcome"]["trials"], 20);
    assert_eq!(refgap(d, &["claims", "--n", "4", "--w", "1", "--trials", "1"]).status.code(), Some(2));
}
