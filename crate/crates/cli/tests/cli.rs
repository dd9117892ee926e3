use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const SUBCOMMANDS: [&str; 6] = [
    "capacity",
    "regression-volume",
    "lattice-volume",
    "perceptron-volume",
    "double-descent",
    "mdl-curve",
];

/// Small but complete invocations of every subcommand.
fn quick_args(cmd: &str) -> Vec<&'static str> {
    match cmd {
        "capacity" => vec!["--d", "1,4", "--n", "3", "--snr", "10", "--samples", "300"],
        "regression-volume" => vec!["--d", "3,12", "--n", "6", "--samples", "200"],
        "lattice-volume" => vec!["--lattice", "bool:1,bool:2", "--samples", "600"],
        "perceptron-volume" => vec!["--d", "1,3", "--grid-points", "16", "--samples", "400"],
        "double-descent" => vec![
            "--n", "40", "--alpha", "0.1,10", "--d-grid", "5,20,60", "--d-true", "10",
            "--folds", "4",
        ],
        "mdl-curve" => vec!["--orders", "1,2,3", "--samples", "300"],
        _ => unreachable!(),
    }
}

fn csv_name(cmd: &str) -> String {
    format!("{}.csv", cmd.replace('-', "_"))
}

fn mdlvol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdlvol"))
        .args(args)
        .env_remove("MDLVOL_THREADS")
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, cmd: &str, extra: &[&str]) -> Output {
    let out = dir.to_str().unwrap();
    let mut args = vec![cmd, "--out", out, "--quiet"];
    args.extend(quick_args(cmd));
    args.extend(extra);
    mdlvol(&args)
}

fn read_csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn help_documents_every_flag() {
    for cmd in SUBCOMMANDS {
        let out = mdlvol(&[cmd, "--help"]);
        assert_eq!(out.status.code(), Some(0), "{cmd}");
        let text = String::from_utf8(out.stdout).unwrap();
        for flag in ["--config", "--out", "--seed", "--svg", "--quiet", "--threads"] {
            assert!(text.contains(flag), "{cmd} --help lacks {flag}");
        }
    }
    assert_eq!(mdlvol(&["--help"]).status.code(), Some(0));
}

#[test]
fn unknown_flags_are_rejected() {
    for cmd in SUBCOMMANDS {
        let out = mdlvol(&[cmd, "--no-such-flag"]);
        assert_eq!(out.status.code(), Some(2), "{cmd}");
    }
    assert_eq!(mdlvol(&["capacity", "--d", "x"]).status.code(), Some(2));
}

#[test]
fn reruns_are_byte_identical() {
    for cmd in SUBCOMMANDS {
        let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
        assert!(run_in(a.path(), cmd, &["--seed", "11"]).status.success(), "{cmd}");
        assert!(run_in(b.path(), cmd, &["--seed", "11", "--threads", "3"]).status.success());
        let name = csv_name(cmd);
        let (x, y) = (fs::read(a.path().join(&name)).unwrap(), fs::read(b.path().join(&name)).unwrap());
        assert_eq!(x, y, "{cmd}");
    }
}

#[test]
fn seed_changes_output() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    run_in(a.path(), "capacity", &["--seed", "1"]);
    run_in(b.path(), "capacity", &["--seed", "2"]);
    assert_ne!(
        fs::read(a.path().join("capacity.csv")).unwrap(),
        fs::read(b.path().join("capacity.csv")).unwrap()
    );
}

#[test]
fn manifest_config_reproduces_the_run() {
    for cmd in SUBCOMMANDS {
        let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
        assert!(run_in(a.path(), cmd, &["--seed", "5"]).status.success());
        let stem = cmd.replace('-', "_");
        let manifest: serde_json::Value = serde_json::from_str(
            &fs::read_to_string(a.path().join(format!("{stem}.manifest.json"))).unwrap(),
        )
        .unwrap();
        assert_eq!(manifest["command"], cmd);
        assert_eq!(manifest["seed"], 5);
        assert!(manifest["tool_version"].as_str().unwrap().starts_with("0.1.0"));
        assert!(manifest["wall_time_ms"].is_u64());
        let cfg = b.path().join("config.json");
        fs::write(&cfg, manifest["config_echo"].to_string()).unwrap();
        let out = mdlvol(&[
            cmd,
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            b.path().to_str().unwrap(),
            "--quiet",
        ]);
        assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        let name = csv_name(cmd);
        assert_eq!(
            fs::read(a.path().join(&name)).unwrap(),
            fs::read(b.path().join(&name)).unwrap(),
            "{cmd}"
        );
    }
}

#[test]
fn flags_override_config() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"d": [2], "n": [3], "snr": [5.0], "samples": 50, "seed": 1}"#).unwrap();
    let out = dir.path().to_str().unwrap();
    let status = mdlvol(&["capacity", "--config", cfg.to_str().unwrap(), "--d", "4", "--out", out]);
    assert!(status.status.success());
    let rows = read_csv_rows(&dir.path().join("capacity.csv"));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][0], "4");
    assert_eq!(rows[1][1], "3");
}

#[test]
fn config_errors() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"dd": [2]}"#).unwrap();
    let r = mdlvol(&["capacity", "--config", bad.to_str().unwrap(), "--out", out]);
    assert_eq!(r.status.code(), Some(2));
    let r = mdlvol(&["capacity", "--config", "/nonexistent/c.json", "--out", out]);
    assert_eq!(r.status.code(), Some(3));
    let r = mdlvol(&["double-descent", "--full", "--config", bad.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    let r = mdlvol(&["double-descent", "--folds", "1", "--out", out]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("plain-file");
    fs::write(&file, "x").unwrap();
    let r = mdlvol(&["capacity", "--d", "1", "--n", "1", "--out", file.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&r.stderr).contains("plain-file"));
}

#[test]
fn singular_regression_exits_four() {
    let dir = TempDir::new().unwrap();
    let r = mdlvol(&[
        "regression-volume",
        "--d",
        "30",
        "--n",
        "10",
        "--no-regularize",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&r.stderr).contains("singular"));
    // the regularized volume exists for the same shape
    let r = mdlvol(&["regression-volume", "--d", "30", "--n", "10", "--out", dir.path().to_str().unwrap()]);
    assert!(r.status.success());
}

#[test]
fn capacity_examples() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    mdlvol(&["capacity", "--d", "1", "--n", "1", "--snr", "1e-9", "--out", out]);
    let rows = read_csv_rows(&dir.path().join("capacity.csv"));
    assert_eq!(rows[0], ["d", "n", "snr", "estimate", "stderr", "lower", "upper", "limit"]);
    assert!(rows[1][3].parse::<f64>().unwrap().abs() < 1e-6);

    mdlvol(&["capacity", "--d", "50", "--n", "5", "--snr", "100", "--out", out]);
    let rows = read_csv_rows(&dir.path().join("capacity.csv"));
    assert!(rows[1][3].parse::<f64>().unwrap() <= 11.55);
}

#[test]
fn lattice_estimate_between_bounds() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let r = mdlvol(&["lattice-volume", "--lattice", "bool:2", "--samples", "5000", "--out", out]);
    assert!(r.status.success());
    let rows = read_csv_rows(&dir.path().join("lattice_volume.csv"));
    let f = |k: usize| rows[1][k].parse::<f64>().unwrap();
    let (est, se, lo, hi) = (f(2), f(3), f(4), f(6));
    assert!(lo - 3.0 * se <= est && est <= hi + 3.0 * se);
}

#[test]
fn lattice_from_json_and_invalid_order() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let diamond = dir.path().join("diamond.json");
    fs::write(&diamond, r#"{"size": 4, "cover_pairs": [[0,1],[0,2],[1,3],[2,3]]}"#).unwrap();
    let r = mdlvol(&["lattice-volume", "--lattice", diamond.to_str().unwrap(), "--samples", "500", "--out", out]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));

    let m = dir.path().join("m.json");
    fs::write(&m, r#"{"size": 5, "cover_pairs": [[0,1],[0,2],[1,3],[2,3],[1,4],[2,4]]}"#).unwrap();
    let r = mdlvol(&["lattice-volume", "--lattice", m.to_str().unwrap(), "--out", out]);
    assert_eq!(r.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&r.stderr).contains("not a lattice"));
}

#[test]
fn svg_output() {
    let dir = TempDir::new().unwrap();
    let r = run_in(dir.path(), "double-descent", &["--svg"]);
    assert!(r.status.success());
    let svg = fs::read_to_string(dir.path().join("double_descent.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2);
    let header = fs::read_to_string(dir.path().join("double_descent.csv")).unwrap();
    assert!(header.starts_with(
        "n,d,alpha,fold_count,train_mse,train_se,test_mse,test_se,beta_norm_sq,empirical_snr,seed\n"
    ));
}
