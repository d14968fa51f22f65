use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn h4(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_h4"))
        .arg("--cache")
        .arg(cache)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn group_prints_order_and_orbits() {
    let dir = tempfile::tempdir().unwrap();
    let o = h4(dir.path(), &["group"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "order=14400, orbits=[120,600,720,1200]\nmatch=true\n");
}

#[test]
fn corrupt_root_fails_loudly() {
    let dir = tempfile::tempdir().unwrap();
    let o = h4(dir.path(), &["group", "--corrupt-root"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("outside the root set"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
}

#[test]
fn warm_cache_reproduces_output() {
    let dir = tempfile::tempdir().unwrap();
    let cold = h4(dir.path(), &["tau"]);
    assert!(stderr(&cold).contains("cache tau: miss"));
    let warm = h4(dir.path(), &["tau"]);
    assert!(stderr(&warm).contains("cache tau: hit"), "{}", stderr(&warm));
    assert_eq!(stdout(&cold), stdout(&warm));
    assert_eq!(cold.status.code(), warm.status.code());
    // the printed τ₄ is not invariant, so the report does not match
    assert_eq!(cold.status.code(), Some(1));
    assert!(stdout(&cold).contains("tau=tau4, source=relabelled, degree=30"));
}

#[test]
fn corrupted_cache_is_rejected_and_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let first = h4(dir.path(), &["group"]);
    let path = dir.path().join("group.txt");
    let text = fs::read_to_string(&path).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines.truncate(lines.len() - 1);
    fs::write(&path, lines.join("\n")).unwrap();
    let again = h4(dir.path(), &["group"]);
    assert!(stderr(&again).contains("cache group: rejected"), "{}", stderr(&again));
    assert_eq!(stdout(&first), stdout(&again));
    assert_eq!(fs::read_to_string(&path).unwrap(), text);

    // a stale header is a miss, not a rejection
    fs::write(&path, text.replacen("sha256 ", "sha256 0", 1)).unwrap();
    let stale = h4(dir.path(), &["group"]);
    assert!(stderr(&stale).contains("cache group: miss"));
}

#[test]
fn json_report_roundtrips() {
    let dir = tempfile::tempdir().unwrap();
    let o = h4(dir.path(), &["--format", "json", "group"]);
    let text = stdout(&o);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["kind"], "group");
    assert_eq!(v["rows"][0]["order"], 14400);
    assert_eq!(v["match"], true);
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", text);
}

#[test]
fn spectrum_degeneracies() {
    let dir = tempfile::tempdir().unwrap();
    let o = h4(dir.path(), &["--level", "6", "spectrum"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("level=0, eigenvalue=0, degeneracy=1, multiplicity=1, match=true\n"));
    assert!(out.contains("level=6, eigenvalue=12, degeneracy=2, multiplicity=2, match=true\n"));

    let symbolic = h4(dir.path(), &["--level", "0", "--omega", "symbolic", "spectrum"]);
    assert!(stderr(&symbolic).contains("cache hamiltonian: hit"));
    assert_eq!(stdout(&symbolic), "level=0, eigenvalue=0, degeneracy=1, multiplicity=1, match=true\nmatch=true\n");
}

#[test]
fn coupling_at_the_bound_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = h4(dir.path(), &["--nu", "1/2", "group"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("-1/4"));
    assert!(!dir.path().join("group.txt").exists());
    let o = h4(dir.path(), &["--omega", "0", "group"]);
    assert_eq!(o.status.code(), Some(2));
}
