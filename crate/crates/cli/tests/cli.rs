use std::path::Path;
use std::process::{Command, Output};

use critline_cli::{cmd_bound, cmd_optimize, cmd_scan, RunConfigFile};
use serde_json::Value;
use tempfile::TempDir;

fn critline(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_critline"))
        .args(args)
        .env("CRITLINE_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn exit_code(args: &[&str]) -> i32 {
    critline(args).status.code().expect("exited normally")
}

fn report(dir: &Path, name: &str, args: &[&str]) -> Value {
    let path = dir.join(name);
    let mut full: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap();
    full.extend(["--report", p]);
    let out = critline(&full);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

fn write_config(dir: &Path, name: &str, edit: impl FnOnce(&str) -> String) -> String {
    let text = edit(&RunConfigFile::load("theorem1").unwrap().to_toml());
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn r_zero_is_a_numerical_failure() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "r0.toml", |t| t.replace("R = 1.3025", "R = 0.0"));
    assert_eq!(exit_code(&["bound", &cfg]), 4);
}

#[test]
fn theta_out_of_range_is_a_constraint_failure() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "theta.toml", |t| {
        t.replace("theta = \"4/7\"", "theta = 0.4")
    });
    assert_eq!(exit_code(&["bound", &cfg]), 3);
}

#[test]
fn missing_config_and_bad_arguments_are_parse_errors() {
    assert_eq!(exit_code(&["bound", "/nonexistent/run.toml"]), 2);
    assert_eq!(
        exit_code(&["scan", "theorem1", "--min", "1.6", "--max", "1.0", "--steps", "5"]),
        2
    );
    assert_eq!(exit_code(&["oracle", "--what", "e_alpha", "--y", "1000", "--j", "12"]), 2);
}

#[test]
fn unknown_config_field_names_the_field() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "extra.toml", |t| {
        t.replace("[quadrature]", "[quadrature]\nnodes_x = 3")
    });
    let out = critline(&["bound", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nodes_x"));
}

#[test]
fn oversized_sieve_and_direct_sum_are_guarded() {
    assert_eq!(exit_code(&["verify", "--lemmas", "L8", "--y", "1e12"]), 5);
    assert_eq!(exit_code(&["oracle", "--what", "sigma", "--y", "600"]), 6);
    assert_eq!(
        exit_code(&["oracle", "--what", "sigma", "--y", "600", "--no-direct"]),
        0
    );
}

#[test]
fn bound_report_has_the_schema_fields() {
    let dir = TempDir::new().unwrap();
    let r = report(dir.path(), "b.json", &["bound", "theorem1"]);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["tool"], "critline");
    assert_eq!(r["command"], "bound");
    assert!(r.get("timing").is_none());
    let kappa = r["results"]["kappa"].as_f64().unwrap();
    assert!((kappa - 0.4128).abs() < 5e-4, "{kappa}");
    let timed = report(dir.path(), "t.json", &["bound", "theorem1", "--timing"]);
    assert!(timed["timing"]["wall_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn reports_are_byte_stable() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        assert!(critline(&["bound", "corollary1", "--report", p.to_str().unwrap()])
            .status
            .success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn config_echo_reproduces_the_run() {
    let dir = TempDir::new().unwrap();
    let first = report(dir.path(), "first.json", &["bound", "theorem1"]);
    let echo: RunConfigFile = serde_json::from_value(first["config"].clone()).unwrap();
    let path = dir.path().join("echo.toml");
    std::fs::write(&path, echo.to_toml()).unwrap();
    let second = report(dir.path(), "second.json", &["bound", path.to_str().unwrap()]);
    assert_eq!(first["results"], second["results"]);
}

#[test]
fn single_step_scan_equals_bound() {
    let config = RunConfigFile::load("theorem1").unwrap();
    let bound = cmd_bound(&config).unwrap();
    let scan = cmd_scan(&config, "R", 1.3025, 1.3025, 1).unwrap();
    assert_eq!(
        scan.report.results["rows"][0]["kappa"],
        bound.report.results["kappa"]
    );
}

#[test]
fn scan_peaks_near_the_published_r() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("scan.csv");
    let out = critline(&[
        "scan", "theorem1", "--min", "1.1", "--max", "1.5", "--steps", "9", "--csv",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("R,kappa"));
    let (r, _) = lines
        .map(|l| {
            let (r, k) = l.split_once(',').unwrap();
            (r.parse::<f64>().unwrap(), k.parse::<f64>().unwrap())
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    assert!((r - 1.3025).abs() <= 0.05, "argmax R = {r}");
}

#[test]
fn frozen_optimize_returns_the_bound() {
    let dir = TempDir::new().unwrap();
    let mut config = RunConfigFile::load("theorem1").unwrap();
    config.optimize.mask.clear();
    let bound = cmd_bound(&config).unwrap();
    let out = cmd_optimize(&config, None, &dir.path().join("best.toml")).unwrap();
    let res = &out.report.results;
    assert_eq!(res["kappa"], bound.report.results["kappa"]);
    assert_eq!(res["start_kappa"], bound.report.results["kappa"]);
    assert_eq!(res["improved"], false);
}

#[test]
fn optimize_writes_a_loadable_sidecar() {
    let dir = TempDir::new().unwrap();
    let best = dir.path().join("best.toml");
    let r = report(
        dir.path(),
        "opt.json",
        &[
            "optimize",
            "theorem1",
            "--out",
            best.to_str().unwrap(),
            "--max-iters",
            "20",
            "--restarts",
            "0",
        ],
    );
    let kappa = r["results"]["kappa"].as_f64().unwrap();
    assert!(kappa >= r["results"]["start_kappa"].as_f64().unwrap());
    let again = report(dir.path(), "again.json", &["bound", best.to_str().unwrap()]);
    assert!((again["results"]["kappa"].as_f64().unwrap() - kappa).abs() < 1e-9);
}

#[test]
fn verify_single_lemma_passes() {
    let dir = TempDir::new().unwrap();
    let r = report(dir.path(), "v.json", &["verify", "--lemmas", "L8", "--y", "1e4"]);
    assert_eq!(r["results"]["all_pass"], true);
    assert_eq!(r["verification"][0]["id"], "L8");
}

#[test]
fn sigma_oracle_at_y_two_is_one() {
    let dir = TempDir::new().unwrap();
    // At y = 2, P1(0) = 0 kills a_2 and y1 = 1, so only a_1 = 1 is left.
    let r = report(dir.path(), "s.json", &["oracle", "--what", "sigma", "--y", "2"]);
    let row = &r["results"]["row"];
    assert!((row["brute"][0].as_f64().unwrap() - 1.0).abs() < 1e-12, "{row}");
    let direct = r["results"]["direct"][0].as_f64().unwrap();
    assert!((direct - row["brute"][0].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn e_alpha_oracle_reports_a_row() {
    let dir = TempDir::new().unwrap();
    let r = report(
        dir.path(),
        "e.json",
        &["oracle", "--what", "e_alpha", "--y", "10000", "--j", "6"],
    );
    assert_eq!(r["results"]["row"]["j"], 6);
    assert!(r["results"]["row"]["scaled_error"].as_f64().unwrap().is_finite());
}

#[test]
fn bad_thread_count_is_rejected() {
    let out = Command::new(env!("CARGO_BIN_EXE_critline"))
        .args(["bound", "theorem1"])
        .env("CRITLINE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
