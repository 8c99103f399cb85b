use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn plonka(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plonka")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn spec(dir: &Path, name: &str, points: &[&str], tags: &[&str]) -> PathBuf {
    let comps: Vec<String> = points.iter().map(|p| format!(r#"{{"point":"{p}"}}"#)).collect();
    let gaps: Vec<String> = tags.iter().map(|t| format!(r#"{{"sigma":"{t}"}}"#)).collect();
    let path = dir.join(name);
    fs::write(&path, format!(r#"{{"components":[{}],"gaps":[{}]}}"#, comps.join(","), gaps.join(","))).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn eval_blocks() {
    let o = plonka(&["eval", "cap", "--x", "1", "--y", "0", "--p", "1/2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "1");
    let o = plonka(&["eval", "linear", "--x", "1/3", "--y", "1", "--p", "1/4"]);
    assert_eq!(stdout(&o).trim(), "5/6");
    let o = plonka(&["eval", "max", "--x", "1/3", "--y", "2/3", "--p", "1/2"]);
    assert_eq!(stdout(&o).trim(), "2/3");
}

#[test]
fn eval_structured_reports_ambient() {
    let dir = TempDir::new().unwrap();
    let f = spec(dir.path(), "s.json", &["0", "1/2", "1"], &["1", "inf"]);
    let o = plonka(&["eval", s(&f), "--x", "1/2", "--y", "1/4", "--p", "1/2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("ambient 1/2"), "{}", stdout(&o));
    // 3/4 sits inside the ∞-gap: refused unless approximation is allowed
    let o = plonka(&["eval", s(&f), "--x", "3/4", "--y", "0", "--p", "1/2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = plonka(&["eval", s(&f), "--x", "3/4", "--y", "0", "--p", "1/2", "--allow-approx"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("approximated"));
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(plonka(&["eval", "cap", "--x", "2", "--y", "0", "--p", "1/2"]).status.code(), Some(2));
    assert_eq!(plonka(&["eval", "cap", "--x", "0", "--y", "0", "--p", "3/2"]).status.code(), Some(2));
    assert_eq!(plonka(&["eval", "/no/such/file", "--x", "0", "--y", "0", "--p", "0"]).status.code(), Some(2));
    assert_eq!(plonka(&["frobnicate"]).status.code(), Some(2));
    let dir = TempDir::new().unwrap();
    let bad = spec(dir.path(), "bad.json", &["1/2", "1"], &["1"]);
    let o = plonka(&["validate", s(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("error"));
}

#[test]
fn bary_reads_distribution_file() {
    let dir = TempDir::new().unwrap();
    let d = dir.path().join("d.json");
    fs::write(&d, r#"{"weights":{"a":"1/3","b":"1/3","c":"1/3"},"points":{"a":"0","b":"1/2","c":"1"}}"#).unwrap();
    let o = plonka(&["bary", "linear", "--dist", s(&d)]);
    assert_eq!(stdout(&o).trim(), "1/2");
    fs::write(&d, r#"{"weights":{"a":"1/2","b":"1/4"},"points":{"a":"0","b":"1"}}"#).unwrap();
    assert_eq!(plonka(&["bary", "linear", "--dist", s(&d)]).status.code(), Some(2));
}

#[test]
fn classify_round_trips_through_iso() {
    let dir = TempDir::new().unwrap();
    let f = spec(dir.path(), "s.json", &["0", "1/2", "1"], &["1", "inf"]);
    let out = dir.path().join("out.json");
    let o = plonka(&["classify", &format!("probe:{}", s(&f)), "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("probed(grid=64, K=30, T=1000)"));
    let o = plonka(&["iso", s(&f), s(&out)]);
    assert_eq!(stdout(&o).lines().next(), Some("isomorphic (witness emitted)"));

    let o = plonka(&["classify", "exp"]);
    assert!(stdout(&o).contains(r#""sigma": "inf""#));
    let o = plonka(&["classify", s(&f)]);
    assert!(stderr(&o).contains("provenance: exact"));
}

#[test]
fn iso_decisions() {
    let dir = TempDir::new().unwrap();
    let a = spec(dir.path(), "a.json", &["0", "1/2", "1"], &["1", "inf"]);
    let b = spec(dir.path(), "b.json", &["0", "1/3", "1"], &["1", "inf"]);
    let c = spec(dir.path(), "c.json", &["0", "1/3", "1"], &["inf", "inf"]);
    let w = dir.path().join("w.txt");
    let o = plonka(&["iso", s(&a), s(&b), "--map-point", "1/4", "--witness", s(&w)]);
    assert!(stdout(&o).contains("ambient 1/6"), "{}", stdout(&o));
    assert!(fs::read_to_string(&w).unwrap().contains("offset identity"));
    let o = plonka(&["iso", s(&a), s(&c)]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("not isomorphic (signature mismatch at position 1"), "{}", stdout(&o));
}

#[test]
fn laws_exit_status_tracks_failures() {
    let o = plonka(&["laws", "max", "--seed", "3", "--samples", "200", "--lc-bar-samples", "20"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("cancellation"));
    let o = plonka(&["laws", "fixture:psq", "--seed", "3", "--samples", "200", "--lc-bar-samples", "20", "--jobs", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
    assert!(stdout(&o).contains("witness"));
}

#[test]
fn laws_replay_is_deterministic() {
    let args = ["laws", "fixture:threshold", "--seed", "11", "--samples", "300", "--lc-bar-samples", "10"];
    assert_eq!(stdout(&plonka(&args)), stdout(&plonka(&args)));
}

#[test]
fn path_writes_csv() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("p.csv");
    let o = plonka(&["path", "linear", "--x", "0", "--y", "1", "--steps", "4", "--out", s(&out)]);
    assert!(o.status.success());
    let csv = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines, ["t,value", "0,0", "0.25,0.25", "0.5,0.5", "0.75,0.75", "1,1"]);
}

#[test]
fn ladder_and_shift() {
    let dir = TempDir::new().unwrap();
    let la = dir.path().join("a.json");
    let lb = dir.path().join("b.json");
    let win = dir.path().join("w.json");
    let o = plonka(&[
        "ladder", "--r", "1/16", "--window", "-1..1", "--left", "inf", "--right", "inf", "--exception", "0=1",
        "--out", s(&win), "--ladder-out", s(&la),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&plonka(&["validate", s(&win)])).starts_with("valid: E = {0} ∪ {1/256} ∪ {1/16} ∪ {1/4} ∪ {1}"));
    plonka(&["ladder", "--r", "1/16", "--window", "0..1", "--left", "inf", "--right", "inf", "--exception", "5=1", "--ladder-out", s(&lb)]);
    assert_eq!(stdout(&plonka(&["shift", s(&la), s(&lb)])).trim(), "shift m = 5");
    assert_eq!(stdout(&plonka(&["shift", s(&lb), s(&la)])).trim(), "shift m = -5");
    let o = plonka(&["eval", &format!("{}@0..2", s(&la)), "--x", "1/2", "--y", "1/256", "--p", "1/2"]);
    assert!(o.status.success(), "{}", stderr(&o));
}
