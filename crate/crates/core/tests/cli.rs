// End-to-end runs of the binary: exit codes, reports and replay.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_groupca");
const ZERO_WORD: &str = r#"{"alphabet":["0","1"],"cells":{"0":"0"}}"#;

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("GROUPCA_CAP_ELEMS").output().unwrap()
}

fn report(out: &Output) -> Value {
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn error_reason(out: &Output) -> String {
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    v["error"]["reason"].as_str().unwrap().to_string()
}

fn without_clock(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("wall_clock_ms");
    v
}

fn single_one(dir: &Path) -> String {
    let p = dir.join("x.json");
    std::fs::write(&p, r#"{"alphabet":["0","1"],"cells":{"0":"1"},"background":{"kind":"uniform","symbol":"0"}}"#)
        .unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn impact_of_the_reflection_is_zero() {
    let v = report(&run(&["impact", "--group", "dinf", "--s", "(0,1)"]));
    let row = &v["result"]["impacts"][0];
    assert_eq!(row["imp"], 0);
    assert_eq!(row["independent_of_k"], true);
    for key in ["command", "version", "caps", "result", "wall_clock_ms"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn and_zero_is_blocking() {
    let v = report(&run(&["verify-blocking", "--ca", "and", "--word", ZERO_WORD, "--region", r#"["0"]"#, "--horizon", "4"]));
    assert_eq!(v["result"]["certificate"]["verdict"]["kind"], "blocking");
}

#[test]
fn xor_counterexample_replays() {
    let v = report(&run(&["verify-blocking", "--ca", "xor", "--word", ZERO_WORD, "--region", r#"["0"]"#, "--horizon", "3"]));
    assert_eq!(v["result"]["certificate"]["verdict"]["kind"], "not_blocking");
    assert_eq!(v["result"]["replayed"], true);
}

#[test]
fn reports_replay_and_ignore_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let x = single_one(dir.path());
    let args = ["evolve", "--ca", "xor", "--config", x.as_str(), "--steps", "4", "--window-radius", "4"];
    let a = without_clock(report(&run(&args)));
    let b = without_clock(report(&run(&args)));
    assert_eq!(a, b);
    let mut threaded = vec!["--threads", "1"];
    threaded.extend(args);
    let c = without_clock(report(&run(&threaded)));
    assert_eq!(a["result"], c["result"]);
    let frames = a["result"]["frames"].as_array().unwrap();
    assert_eq!(frames.len(), 5);
}

#[test]
fn search_and_equicontinuity_agree() {
    let s = report(&run(&["search-blocking", "--ca", "xor-wall", "--k", "0", "--max-radius", "0"]));
    assert!(!s["result"].is_null());
    let e = report(&run(&["equicontinuity-check", "--ca", "xor-wall", "--k", "2", "--trials", "20", "--probes", "100"]));
    assert_eq!(e["result"]["pipeline"]["passed"], true, "{e}");
    assert_eq!(e["result"]["pipeline"]["period"], 5);
}

#[test]
fn out_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run(&["--out", out.to_str().unwrap(), "rectangles", "--k-max", "2", "--l-max", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(v["result"].is_object());
}

#[test]
fn counterexample_dumps_dot() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "counterexample",
        "--experiment",
        "obstacle",
        "--n",
        "2",
        "--trials",
        "3",
        "--dump-dot",
        dir.path().to_str().unwrap(),
    ]);
    report(&o);
    let dot = std::fs::read_to_string(dir.path().join("obstacle.dot")).unwrap();
    assert!(dot.starts_with("digraph") || dot.starts_with("graph"), "{dot}");
}

#[test]
fn lift_and_glue_run() {
    report(&run(&["lift-check", "--ca", "xor", "--steps", "3", "--window", "3", "--reps-radius", "1"]));
    let wall = |n: i64| format!(r#"{{"alphabet":["0","1","W"],"cells":{{"{n}":"W"}}}}"#);
    let (l, r) = (wall(-3), wall(3));
    report(&run(&[
        "glue", "--ca", "xor-wall", "--left-word", &l, "--left-region", r#"["-3"]"#, "--right-word", &r,
        "--right-region", r#"["3"]"#, "--horizon", "3",
    ]));
}

#[test]
fn exit_codes() {
    let o = run(&["no-such-command"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_reason(&o), "usage");

    assert_eq!(run(&["rectangles", "--group", "z"]).status.code(), Some(2));

    let o = run(&[
        "verify-blocking", "--ca", "and", "--word", ZERO_WORD, "--region", r#"["0"]"#, "--horizon", "30",
        "--no-set-pruning", "--max-enum", "100",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(error_reason(&o), "cap_exceeded");

    let dir = tempfile::tempdir().unwrap();
    let x = single_one(dir.path());
    let o = Command::new(BIN)
        .args(["evolve", "--ca", "xor", "--config", x.as_str(), "--window-radius", "20"])
        .env("GROUPCA_CAP_ELEMS", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));

    let o = run(&["evolve", "--group", "free:2", "--ca", "xor", "--config", x.as_str()]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(error_reason(&o), "precondition");

    let o = run(&["impact", "--group", "qq"]);
    assert_eq!(o.status.code(), Some(5));
    assert_eq!(error_reason(&o), "parse");
    assert_eq!(run(&["evolve", "--ca", "xor", "--config", "/nonexistent.json"]).status.code(), Some(5));
}
