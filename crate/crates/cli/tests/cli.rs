use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = r#"
n = 4
outer_radius = 1.0
outer_bc = "neumann"
tau = 1.0

[cross_section]
kind = "round_sphere"
a = 0.8

[warp]
kind = "exact"

[mesh]
points = 128
grading = "auto"
"#;

fn conelab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conelab"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

#[test]
fn passing_run_exits_zero_and_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.toml", SMALL);
    let out = conelab(&["mu-solve", "c.toml", "--out", "o"], dir.path());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert!(stdout.lines().any(|l| l.starts_with("PASS")));
    assert!(!stdout.contains("FAIL"));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("o/mu-solve.json")).unwrap()).unwrap();
    assert_eq!(json["passed"], true);
    assert_eq!(json["config_hash"].as_str().unwrap().len(), 64);
    let csv = fs::read_dir(dir.path().join("o"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.extension().is_some_and(|e| e == "csv"))
        .unwrap();
    let csv = fs::read_to_string(csv).unwrap();
    assert!(csv.starts_with("r,u,mode,config_hash"));
}

#[test]
fn failed_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.toml", &format!("{SMALL}\n[solver]\nmax_iters = 2\n"));
    let out = conelab(&["mu-solve", "c.toml", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn low_dimension_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.toml", &SMALL.replace("n = 4", "n = 2"));
    let out = conelab(&["lambda-sweep", "c.toml", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n >= 3"));
    assert!(!dir.path().join("o").exists());
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.toml", &SMALL.replace("tau = 1.0", "tau = 1.0\nbogus = 3"));
    let out = conelab(&["mu-solve", "c.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.toml", SMALL);
    for out in ["a", "b"] {
        let res = conelab(&["decay-fit", "c.toml", "--out", out], dir.path());
        assert!(res.status.code().is_some_and(|c| c <= 1));
    }
    let read = |sub: &str| {
        let mut files: Vec<_> = fs::read_dir(dir.path().join(sub))
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        files.sort();
        files
            .iter()
            .map(|p| (p.file_name().unwrap().to_owned(), fs::read(p).unwrap()))
            .collect::<Vec<_>>()
    };
    let (a, b) = (read("a"), read("b"));
    assert!(!a.is_empty());
    assert_eq!(a, b);
}
