use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bellpoly"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env_remove("BELLPOLY_STRATEGY_CAP").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Non-comment lines of a text output.
fn body(o: &Output) -> Vec<String> {
    stdout(o).lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()).map(str::to_string).collect()
}

fn tempdir(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("bellpoly-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&d).unwrap();
    d
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, content).unwrap();
    p.display().to_string()
}

const CHSH: &str = "# scenario 2 2 2\n# representation corr\n# kind inequality\n2 : 1 1 1 -1\n";

#[test]
fn vertex_counts() {
    let o = run(&["vertices", "--scenario", "2,2,2", "--rep", "corr"]);
    assert!(o.status.success());
    assert_eq!(body(&o).len(), 8);
    let o = run(&["vertices", "--scenario", "1,1,2", "--rep", "prob"]);
    assert_eq!(body(&o).len(), 2);
}

#[test]
fn strategy_cap_exit_code() {
    let o = run(&["vertices", "--scenario", "3,3,3", "--rep", "prob", "--cap", "1000"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin().args(["vertices", "--scenario", "3,3,3", "--rep", "prob"]).env("BELLPOLY_STRATEGY_CAP", "1000").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["vertices", "--scenario", "2,2", "--rep", "corr"]).status.code(), Some(1));
    assert_eq!(run(&["vertices", "--scenario", "2,2,2", "--rep", "xyz"]).status.code(), Some(1));
    assert_eq!(run(&["classify", "/nonexistent/file"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn facet_counts_and_classes() {
    let dir = tempdir("facets");
    for (rep, count) in [("corr", 16), ("prob", 24)] {
        let path = dir.join(format!("{rep}.txt")).display().to_string();
        let o = run(&["facets", "--scenario", "2,2,2", "--rep", rep, "--output", &path]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), count);
        let c = run(&["classify", &path]);
        assert!(c.status.success());
        assert_eq!(body(&c).len(), 2, "{}", stdout(&c));
    }
}

#[test]
fn long_enumeration_is_gated() {
    let o = run(&["facets", "--scenario", "2,3,2", "--rep", "prob"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--allow-long"));
}

#[test]
fn single_inequality_is_one_class() {
    let dir = tempdir("single");
    let f = write(&dir, "chsh.txt", CHSH);
    let o = run(&["classify", &f, "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let classes = v["classes"].as_array().unwrap();
    assert_eq!(classes.len(), 1);
    assert!(classes[0]["orbit_size"].as_u64().unwrap() >= 1);
}

#[test]
fn check_reports() {
    let dir = tempdir("check");
    let f = write(
        &dir,
        "x.txt",
        "# scenario 2 4 2\n# representation corr\n# kind inequality\n\
         6 : 2 1 -1 0 1 -1 1 1 -1 1 -1 1 0 1 1 0\n\
         10 : 1 1 2 2 1 2 1 -2 2 1 -2 1 2 -2 1 -1\n",
    );
    let o = run(&["check", &f, "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for (r, b) in v["inequalities"].as_array().unwrap().iter().zip(["6", "10"]) {
        assert_eq!(r["valid"], true);
        assert_eq!(r["tight"], true);
        assert_eq!(r["facet"], true);
        assert_eq!(r["max_value"], b);
    }

    let f = write(
        &dir,
        "chsh.txt",
        "# scenario 2 2 2\n# representation corr\n# kind inequality\n3 : 1 1 1 -1\n1 : 1 1 1 -1\n",
    );
    let o = run(&["check", &f]);
    let lines = body(&o);
    assert!(lines[0].contains(" valid ") && lines[0].contains("not-tight"), "{}", lines[0]);
    assert!(lines[1].contains("invalid") && lines[1].contains("witness"), "{}", lines[1]);
}

#[test]
fn check_points() {
    let dir = tempdir("points");
    let f = write(&dir, "chsh.txt", CHSH);
    let p = write(&dir, "p.txt", "# scenario 2 2 2\n# representation corr\n0 0 0 0\n1 1 1 -1\n");
    let lines = body(&run(&["check", &f, "--points", &p]));
    assert_eq!(lines[1], "point 1: inside");
    assert!(lines[2].starts_with("point 2: outside separator"));
}

#[test]
fn ww_counts_and_membership() {
    for (n, count) in [("1", 4), ("2", 16), ("3", 256)] {
        let o = run(&["ww", "--parties", n]);
        assert!(o.status.success());
        assert_eq!(body(&o).len(), count);
    }
    let dir = tempdir("ww");
    let p = write(&dir, "p.txt", "# scenario 2 2 2\n# representation corr\n1/2 1/2 1/2 -1/2\n1 1 1 -1\n");
    let lines = body(&run(&["ww", "--points", &p]));
    assert_eq!(lines, ["point 1: inside l1 4 threshold 4", "point 2: outside l1 8 threshold 4"]);
}

#[test]
fn quantum_values() {
    let dir = tempdir("quantum");
    let f = write(
        &dir,
        "q.txt",
        "# scenario 2 2 2\n# representation corr\n# kind inequality\n2 : 1 1 1 -1\n1 : 1 0 0 0\n",
    );
    let o = run(&["quantum", &f, "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let r = v["inequalities"].as_array().unwrap();
    assert!((r[0]["value"].as_f64().unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-7);
    assert!((r[0]["violation_ratio"].as_f64().unwrap() - std::f64::consts::SQRT_2).abs() < 1e-7);
    assert!((r[1]["value"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((r[1]["violation_ratio"].as_f64().unwrap() - 1.0).abs() < 1e-9);

    let m = write(
        &dir,
        "m.txt",
        "# scenario 3 2 2\n# representation corr\n# kind inequality\n2 : 0 1 1 0 1 0 0 -1\n",
    );
    let lines = body(&run(&["quantum", &m]));
    assert!(lines[0].contains("value 4.0000000") && lines[0].contains("ratio 2.000000"), "{}", lines[0]);
}

#[test]
fn json_reports_are_reproducible() {
    let dir = tempdir("repro");
    let f = write(&dir, "chsh.txt", CHSH);
    let a = run(&["quantum", &f, "--format", "json", "--seed", "7", "--restarts", "4"]);
    let b = run(&["quantum", &f, "--format", "json", "--seed", "7", "--restarts", "4", "--threads", "1"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["spec_version"], "1.0");
    assert_eq!(v["config"]["seed"], 7);
}

#[test]
fn outputs_round_trip() {
    let dir = tempdir("roundtrip");
    for format in ["text", "json"] {
        let vpath = dir.join(format!("v.{format}")).display().to_string();
        assert!(run(&["vertices", "--scenario", "2,2,2", "--rep", "prob", "--format", format, "-o", &vpath]).status.success());
        let (_, _, vs) = bellpoly::io::parse_vertices(&fs::read_to_string(&vpath).unwrap()).unwrap();
        assert_eq!(vs.len(), 16);

        let fpath = dir.join(format!("f.{format}")).display().to_string();
        assert!(run(&["facets", "--scenario", "2,2,2", "--rep", "prob", "--format", format, "-o", &fpath]).status.success());
        let (_, _, fs_) = bellpoly::io::parse_inequalities(&fs::read_to_string(&fpath).unwrap()).unwrap();
        assert_eq!(fs_.len(), 24);
        // Files written by one command feed the next.
        assert!(run(&["check", &fpath, "--points", &vpath]).status.success());
    }
}
