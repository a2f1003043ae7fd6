use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aggregate1d")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn summary_values() {
    let o = run(&["summary", "--alpha", "1", "--regime", "B", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert!((v["R"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["E"].as_f64().unwrap() + 1.0 / 6.0).abs() < 1e-12);

    let v = stdout_json(&run(&["summary", "--alpha", "0", "--regime", "B", "--format", "json"]));
    assert!((v["R"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-12);
    assert_eq!(v["E"], "n/a");

    let text = String::from_utf8(run(&["summary", "--alpha", "2.5"]).stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("regime") && l.trim_end().ends_with('A')));
    assert!(!text.contains("\nD "));
}

#[test]
fn summary_rejects_regime_boundary() {
    assert_eq!(code(&run(&["summary", "--alpha", "2", "--regime", "A"])), 2);
    assert_eq!(code(&run(&["summary", "--alpha", "1.5", "--regime", "A"])), 2);
    assert_eq!(code(&run(&["summary"])), 2);
    assert_eq!(code(&run(&["summary", "--alpha", "1", "--regime", "C"])), 2);
}

#[test]
fn verify_exit_codes() {
    let o = run(&["verify", "--el", "--alpha", "2.5"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["pass"], true);

    let o = run(&["verify", "--identity", "COMPINT", "--alpha", "2.5", "--x", "0"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["identity"], "COMPINT");
    assert_eq!(v["xs"].as_array().unwrap().len(), 1);

    assert_eq!(code(&run(&["verify", "--identity", "INT1A", "--alpha", "2.5"])), 2);
    assert_eq!(code(&run(&["verify", "--alpha", "2.5"])), 2);
    assert_eq!(code(&run(&["verify", "--identity", "INT9", "--alpha", "2.5"])), 2);
}

#[test]
fn verify_failure_is_exit_one() {
    // no tolerance is tight enough to reject an exact identity, so demand the impossible
    let o = run(&["verify", "--identity", "INT3A", "--alpha", "0.5", "--x", "1.5,-2", "--tol", "1e-300"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout_json(&o)["pass"], false);
}

#[test]
fn solve_particles_report() {
    let o = run(&["solve", "--method", "particles", "--alpha", "2.5", "-n", "200", "--seed", "7"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert!(v["relative_gap"].as_f64().unwrap() < 2e-3);
    assert_eq!(v["method"], "particles");
}

#[test]
fn solve_two_particles() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.json");
    // the default stop leaves the distance within about 1e-7; the exactness check needs a finer one
    let o = run(&[
        "solve", "--method", "particles", "-n", "2", "--alpha", "2.5", "--grad-tol", "1e-12", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let m: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let x: Vec<f64> = m["positions"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!(((x[1] - x[0]).abs() - 1.0).abs() < 1e-8);
}

#[test]
fn solve_grid_energy() {
    let o = run(&["solve", "--method", "grid", "--alpha", "1", "--regime", "B", "--grid", "-2:2:801"]);
    assert_eq!(code(&o), 0);
    let e = stdout_json(&o)["final_energy"].as_f64().unwrap();
    assert!((e + 1.0 / 6.0).abs() < 1e-4, "{e}");
    assert_eq!(code(&run(&["solve", "--method", "grid", "--alpha", "1", "--grid", "-2:2"])), 2);
    assert_eq!(code(&run(&["solve", "--method", "annealing", "--alpha", "1"])), 2);
}

#[test]
fn solve_budget_exhaustion_is_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let o = run(&["solve", "--method", "grid", "--alpha", "2.5", "--max-iters", "5", "--report", report.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["termination"], "max_iterations");
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn sweep_towards_three() {
    let o = run(&["sweep", "--alpha-min", "2.5", "--alpha-max", "2.999", "--steps", "10", "--regime", "A"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("alpha,R,E,second_moment,el_residual\n"));
    let (_, rows) = csv_rows(&text);
    assert_eq!(rows.len(), 10);
    let miss: Vec<f64> = rows.iter().map(|r| (r[2].parse::<f64>().unwrap() + 1.0 / 24.0).abs()).collect();
    for w in miss[5..].windows(2) {
        assert!(w[1] < w[0]);
    }
    // 17 significant digits, exponent form
    let mantissa = rows[0][1].split('e').next().unwrap();
    assert_eq!(mantissa.replace(['.', '-'], "").len(), 17);
}

#[test]
fn sweep_regime_b() {
    let o = run(&["sweep", "--alpha-min", "-0.5", "--alpha-max", "1.5", "--steps", "5", "--regime", "B"]);
    assert_eq!(code(&o), 0);
    let (_, rows) = csv_rows(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[1][2], "n/a");
    for r in &rows {
        assert!(r[4].parse::<f64>().unwrap() < 1e-6);
    }
    let o = run(&["sweep", "--alpha-min", "0.7", "--alpha-max", "1.2", "--steps", "1"]);
    let (_, rows) = csv_rows(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0].parse::<f64>().unwrap(), 0.7);
    assert_eq!(code(&run(&["sweep", "--alpha-min", "1.5", "--alpha-max", "2.5", "--steps", "3", "--regime", "B"])), 2);
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.cfg", "# summary\nalpha = 1\nregime = B\nformat = json\n");
    let v = stdout_json(&run(&["--config", &cfg, "summary"]));
    assert!((v["R"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let v = stdout_json(&run(&["summary", "--config", &cfg, "--alpha", "0.5"]));
    assert_eq!(v["alpha"], 0.5);

    let bad = write(dir.path(), "bad.cfg", "alpha = 1\ncolour = red\n");
    assert_eq!(code(&run(&["--config", &bad, "summary"])), 2);
    let missing = dir.path().join("none.cfg");
    assert_eq!(code(&run(&["--config", missing.to_str().unwrap(), "summary", "--alpha", "1"])), 1);

    let sweep_cfg = write(dir.path(), "sweep.cfg", "alpha-min = 2.2\nalpha_max = 2.8\nsteps = 3\nformat = json\n");
    let out = dir.path().join("sweep.json");
    let o = run(&["--config", &sweep_cfg, "sweep", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 3);
}
