use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use kitai_core::report::validate;

const BIN: &str = env!("CARGO_BIN_EXE_kitai-lab");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("KITAI_PRECISION")
        .output()
        .expect("binary runs")
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// (golden name, expected exit code, arguments)
const CASES: &[(&str, i32, &[&str])] = &[
    ("laguerre", 0, &["laguerre", "--n-max", "12", "--grid", "1,2,4,8"]),
    ("witness_t", 0, &["witness", "--f", "t", "--grid", "1,2,4,8"]),
    ("witness_inverse", 0, &["witness", "--direction", "inverse", "--grid", "1,4,16"]),
    ("xval", 0, &["xval", "--f", "t^2", "--n", "range:0:4", "--truncation", "16"]),
    ("orbit", 0, &["orbit", "--x", "e2", "--grid", "1,2,4,8", "--expect", "grows"]),
    ("weights", 0, &["weights", "--w", "harmonic", "--n", "20"]),
    ("atzmon", 0, &["atzmon", "--x", "e1", "--grid", "geom:64:1024"]),
    ("qn", 0, &["qn", "--f", "t", "--c", "1/2", "--grid", "range:1:8"]),
    ("transfer_identity", 0, &["transfer", "--dim", "24", "--identity", "--precision", "128"]),
    ("permute_seq", 0, &["permute", "--n", "60"]),
    ("permute_prop1", 0, &["permute", "--mode", "prop1", "--n", "60", "--gaps", "2,5,3"]),
];

#[test]
fn golden_reports() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for (name, code, args) in CASES {
        let mut full: Vec<&str> = args.to_vec();
        full.push("--no-timestamp");
        let out = run(&full);
        assert_eq!(out.status.code(), Some(*code), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let text = String::from_utf8(out.stdout).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        validate(&value).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(value["command"], args[0]);
        let path = golden_dir().join(format!("{name}.json"));
        if update {
            std::fs::create_dir_all(golden_dir()).unwrap();
            std::fs::write(&path, &text).unwrap();
        } else {
            let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden {}", path.display()));
            assert_eq!(text, want, "{name} differs from its golden file");
        }
    }
}

#[test]
fn reports_are_reproducible() {
    let args = ["qn", "--grid", "1,3,9", "--no-timestamp"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let stamped = run(&["qn", "--grid", "1,3,9"]);
    let v: serde_json::Value = serde_json::from_slice(&stamped.stdout).unwrap();
    assert!(v["timestamp"].as_str().unwrap().starts_with("unix:"));
}

#[test]
fn witness_spec_example() {
    let out = run(&["witness", "--f", "1", "--lambda", "1", "--grid", "geom:1:1024", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["results"]["decreasing"], "pass");
    assert_eq!(v["results"]["bounds"].as_array().unwrap().len(), 11);
}

#[test]
fn weight_verdicts() {
    let out = run(&["weights", "--w", "power:2", "--n", "500", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["results"]["verdict"], "violated");
    let out = run(&["weights", "--w", "const:1", "--n", "100", "--expect", "satisfied"]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["weights", "--w", "const:1", "--n", "100", "--expect", "violated"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing_dir = dir.path().join("no/such/dir/report.json");
    let cases: Vec<Vec<String>> = vec![
        vec!["weights".into(), "--w".into(), "bogus".into()],
        vec!["witness".into(), "--lambda".into(), "1/0".into()],
        vec!["witness".into(), "--lambda".into(), "one".into()],
        vec!["witness".into(), "--grid".into(), "geom:x".into()],
        vec!["frobnicate".into()],
        vec!["transfer".into(), "--dim".into(), "8".into()],
        vec!["qn".into(), "--grid".into(), "1".into(), "--out".into(), missing_dir.display().to_string()],
        vec!["--config".into(), "/nonexistent/kitai.toml".into()],
        vec!["qn".into(), "--precision".into(), "100000".into()],
    ];
    let mut messages = Vec::new();
    for args in &cases {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = run(&refs);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        messages.push(String::from_utf8_lossy(&out.stderr).to_string());
    }
    // each failure class names its cause
    assert!(messages[0].contains("unknown weight spec"));
    assert!(messages[2].contains("not a rational"));
    assert!(messages[5].contains("at least 3"));
    assert!(messages[6].contains("cannot write report"));
    assert!(messages[7].contains("cannot read config"));
}

#[test]
fn failed_check_exits_1() {
    let out = run(&["orbit", "--x", "e1", "--grid", "1,2,4", "--expect", "decays"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["results"]["verdict"], "grows");
}

#[test]
fn config_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let toml = dir.path().join("qn.toml");
    std::fs::write(&toml, "subcommand = \"qn\"\nf = \"t\"\nc = \"1/2\"\ngrid = \"range:1:5\"\nno_timestamp = true\n").unwrap();
    let json = dir.path().join("qn.json");
    std::fs::write(&json, r#"{"subcommand": "qn", "f": "t", "c": "1/2", "grid": [1, 2, 3, 4, 5], "no-timestamp": true}"#).unwrap();
    let flags = run(&["qn", "--f", "t", "--c", "1/2", "--grid", "range:1:5", "--no-timestamp"]);
    let from_toml = run(&["--config", toml.to_str().unwrap()]);
    assert_eq!(from_toml.status.code(), Some(0));
    assert_eq!(flags.stdout, from_toml.stdout);
    // the list form echoes differently but computes the same numbers
    let from_json = run(&["--config", json.to_str().unwrap()]);
    let a: serde_json::Value = serde_json::from_slice(&flags.stdout).unwrap();
    let b: serde_json::Value = serde_json::from_slice(&from_json.stdout).unwrap();
    assert_eq!(a["results"], b["results"]);
    assert_eq!(b["inputs"]["grid"], "1,2,3,4,5");
}

#[test]
fn precision_from_env() {
    let out = Command::new(BIN)
        .args(["qn", "--grid", "1", "--no-timestamp"])
        .env("KITAI_PRECISION", "64")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["precision"], 64);
    let out = Command::new(BIN)
        .args(["qn", "--grid", "1", "--precision", "96", "--no-timestamp"])
        .env("KITAI_PRECISION", "64")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["precision"], 96);
}

#[test]
fn csv_and_report_files() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let csv = dir.path().join("r.csv");
    let out = run(&[
        "witness",
        "--grid",
        "1,10,100",
        "--out",
        report.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    validate(&v).unwrap();
    let table = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "n,norm_mid,norm_rad");
    assert_eq!(lines.len(), 4);
    let mids: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(mids.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn transfer_seed0_and_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["transfer", "--matrices", dir.path().to_str().unwrap(), "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    validate(&v).unwrap();
    assert_eq!(v["config"]["seed"], 0);
    for name in ["J", "T0", "T1", "T2", "T"] {
        let text = std::fs::read_to_string(dir.path().join(format!("{name}.csv"))).unwrap();
        assert_eq!(text.lines().count(), 1 + 32 * 32);
    }
}
