//! End-to-end checks of the binary's verbs and exit codes; the heavyweight
//! determinism check on `run` lives in the acceptance suite.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn hefl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hefl"))
        .args(args)
        .output()
        .expect("binary spawns")
}

fn scenario(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(file)
}

fn write_demo_scenario(dir: &Path) -> PathBuf {
    std::fs::write(
        dir.join("devices.csv"),
        "compute_speed,bandwidth_bps,base_train_time_s\n\
         1.0,20000000,10.0\n\
         0.5,20000000,12.0\n",
    )
    .expect("trace written");
    let config = dir.join("demo.toml");
    std::fs::write(
        &config,
        r#"
[population]
trace = "devices.csv"
n_clients = 20

[tiering]
criteria = ["latency"]
k = 2

[run]
rounds = 5
participation = 1.0
seeds = [1, 2]
strategies = ["baseline", "rl"]
model_params = 1000000
"#,
    )
    .expect("config written");
    config
}

#[test]
fn validate_accepts_shipped_scenarios() {
    for file in [
        "motivation_20clients.toml",
        "default_1000.toml",
        "sweep_alpha.toml",
        "sweep_k.toml",
    ] {
        let out = hefl(&["validate", scenario(file).to_str().unwrap()]);
        assert!(
            out.status.success(),
            "{file}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let line = String::from_utf8_lossy(&out.stdout);
        assert!(line.contains(": ok ("), "unexpected summary: {line}");
    }
}

#[test]
fn validate_rejects_bad_config_with_code_2() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("bad.toml");
    std::fs::write(&config, "[population]\ntrace = \"x.csv\"\nn_clients = 0\n").unwrap();
    let out = hefl(&["validate", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("n_clients"),
        "error should name the offending key"
    );
}

#[test]
fn run_writes_reports_and_prints_summary() {
    let dir = TempDir::new().unwrap();
    let config = write_demo_scenario(dir.path());
    let out_dir = dir.path().join("results");
    let out = hefl(&[
        "run",
        config.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("baseline") && stdout.contains("rl"));

    let root = out_dir.join("demo");
    for file in [
        "summary.csv",
        "summary.json",
        "runs/baseline_seed1.csv",
        "runs/rl_seed2_qtable.json",
        "plots/accuracy_rl.csv",
        "population_seed1.json",
        "tiering_seed2.json",
    ] {
        assert!(root.join(file).exists(), "missing {file}");
    }
}

#[test]
fn run_honors_out_dir_env_var() {
    let dir = TempDir::new().unwrap();
    let config = write_demo_scenario(dir.path());
    let out_dir = dir.path().join("from_env");
    let out = Command::new(env!("CARGO_BIN_EXE_hefl"))
        .args(["run", config.to_str().unwrap(), "--seed", "1"])
        .env("HEFL_OUT_DIR", &out_dir)
        .output()
        .expect("binary spawns");
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out_dir.join("demo/summary.csv").exists());
    // --seed narrows the grid to one seed per strategy.
    assert!(out_dir.join("demo/runs/baseline_seed1.csv").exists());
    assert!(!out_dir.join("demo/runs/baseline_seed2.csv").exists());
}

#[test]
fn sweep_rejects_invalid_k_with_code_2() {
    let dir = TempDir::new().unwrap();
    let config = write_demo_scenario(dir.path());
    let out = hefl(&[
        "sweep",
        config.to_str().unwrap(),
        "--axis",
        "k",
        "--values",
        "2.5",
        "--out-dir",
        dir.path().join("s").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dump_qtable_prints_learned_tables() {
    let dir = TempDir::new().unwrap();
    let config = write_demo_scenario(dir.path());
    let out_dir = dir.path().join("results");
    let run = hefl(&[
        "run",
        config.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(run.status.success());

    let dump = hefl(&["dump-qtable", out_dir.join("demo").to_str().unwrap()]);
    assert!(dump.status.success());
    let text = String::from_utf8_lossy(&dump.stdout);
    assert!(text.contains("rl_seed1_qtable.json"));
    assert!(text.contains("\"values\""));

    // A directory with no tables is an error, not silence.
    let empty = TempDir::new().unwrap();
    std::fs::create_dir(empty.path().join("runs")).unwrap();
    let none = hefl(&["dump-qtable", empty.path().to_str().unwrap()]);
    assert_eq!(none.status.code(), Some(1));
}
