use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const STAR: &str = "\
# three terminals around one cheap relay
node v cap 1 cost 1
node s1 cap 2 cost 1 terminal
node s2 cap 2 cost 1 terminal
node s3 cap 2 cost 1 terminal
edge s1 v
edge s2 v
edge s3 v
lambda 10
";

fn ncflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncflow")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn solve_star(dir: &Path) -> (PathBuf, PathBuf) {
    let inst = write(dir, "star.txt", STAR);
    let sol = dir.join("star.sol");
    let out = ncflow(&["solve", s(&inst), "--output", s(&sol)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    (inst, sol)
}

#[test]
fn star_solution_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let (inst, sol) = solve_star(dir.path());
    let text = std::fs::read_to_string(&sol).unwrap();
    assert!(text.contains("phi = 7"));
    for line in text.lines().filter(|l| l.starts_with("path ")) {
        let w = line.split(' ').nth(1).unwrap();
        let (p, q) = w.split_once('/').unwrap();
        assert!(q == "1" || q == "2", "{w}");
        assert!(p.parse::<u64>().is_ok());
    }
    let out = ncflow(&["verify", s(&inst), s(&sol)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
}

#[test]
fn malformed_instance_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.txt", "node a cap one cost 1\n");
    assert_eq!(ncflow(&["solve", s(&bad)]).status.code(), Some(2));
    let missing = dir.path().join("missing.txt");
    assert_eq!(ncflow(&["solve", s(&missing)]).status.code(), Some(2));
}

#[test]
fn invalid_instance_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let loopy = write(dir.path(), "loop.txt", "node a cap 1 cost 1 terminal\nnode b cap 1 cost 1 terminal\nedge a a\n");
    assert_eq!(ncflow(&["solve", s(&loopy)]).status.code(), Some(3));
}

#[test]
fn zero_lambda_gives_zero_multiflow() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "star.txt", STAR);
    let out = ncflow(&["solve", s(&inst), "--lambda", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(!text.lines().any(|l| l.starts_with("path ")));
    assert!(text.contains("objective 0/1"));
}

#[test]
fn tampered_weight_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let (inst, sol) = solve_star(dir.path());
    let text = std::fs::read_to_string(&sol).unwrap();
    let line = text.lines().find(|l| l.starts_with("path ")).unwrap();
    let w = line.split(' ').nth(1).unwrap();
    let tampered = text.replacen(line, &line.replacen(w, "1/4", 1), 1);
    let bad = write(dir.path(), "bad.sol", &tampered);
    assert_eq!(ncflow(&["verify", s(&inst), s(&bad)]).status.code(), Some(1));
}

#[test]
fn tampered_dual_fails_dual_feasibility() {
    let dir = tempfile::tempdir().unwrap();
    let (inst, sol) = solve_star(dir.path());
    let text = std::fs::read_to_string(&sol).unwrap();
    let bad = write(dir.path(), "bad.sol", &text.replace("dual v 7/1", "dual v 1/1"));
    let out = ncflow(&["verify", s(&inst), s(&bad), "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let checks = report[0]["checks"].as_array().unwrap();
    let dual = checks.iter().find(|c| c["check"] == "dual feasibility").unwrap();
    assert_eq!(dual["ok"], false);
}

#[test]
fn generator_is_deterministic() {
    let a = ncflow(&["gen", "--seed", "11", "--nodes", "5"]);
    let b = ncflow(&["gen", "--seed", "11", "--nodes", "5"]);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("node ")).count(), 5);
}

#[test]
fn batch_verification_in_parallel() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["verify".to_string(), "--jobs".into(), "4".into()];
    for seed in 0..8 {
        let gen = ncflow(&["gen", "--seed", &seed.to_string(), "--nodes", "6"]);
        let inst = write(dir.path(), &format!("g{seed}.txt"), &String::from_utf8(gen.stdout).unwrap());
        let sol = dir.path().join(format!("g{seed}.sol"));
        assert_eq!(ncflow(&["solve", s(&inst), "-o", s(&sol)]).status.code(), Some(0));
        args.push(s(&inst).into());
        args.push(s(&sol).into());
    }
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    let out = ncflow(&refs);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).matches("PASS").count(), 8);
}

#[test]
fn json_solve_output_parses() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "star.txt", STAR);
    let out = ncflow(&["--json", "solve", s(&inst)]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["phi"], "7/1");
    assert_eq!(v["dual"]["v"], "7/1");
}

#[test]
fn dump_h_forms() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "star.txt", &STAR.replace("node v cap 1", "node v cap 2"));
    let compact = ncflow(&["dump-h", s(&inst), "--form", "compact"]);
    let expensive = ncflow(&["dump-h", s(&inst), "--form", "expensive"]);
    assert_eq!(compact.status.code(), Some(0));
    let c = String::from_utf8(compact.stdout).unwrap();
    let e = String::from_utf8(expensive.stdout).unwrap();
    assert!(c.starts_with("h compact"));
    assert!(e.contains("hub:v:1"));
    assert!(!c.contains("hub:v:1"));
}
