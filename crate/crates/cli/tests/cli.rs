//! End-to-end tests of the binary: artifact layout, determinism, error
//! handling, and the report table.

use std::path::Path;
use std::process::{Command, Output};

fn lodegp(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lodegp"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

/// A small integrator problem that runs in well under a second.
const SMALL: &str = r#"
name = "smoke"
seed = 5

[system]
a = [[0.0, 1.0], [0.0, 0.0]]
b = [[0.0], [1.0]]

[initial]
x0 = [0.5, 0.0]

[grid]
t0 = 0.0
t_end = 0.6
points = 13

[model]
variant = "gpmos"

[hyperparameters]
signal_variance = 1.0
lengthscale = 1.0
train_max_iters = 40

[cost]
s_diag = [0.001, 1.0, 1.0]
z_ref = ["zero", "zero", "zero"]

[bounds]
x1 = { lower = -1.0, upper = 1.0 }
x2 = { lower = -1.0, upper = 1.0 }
u1 = { lower = -2.0, upper = 2.0 }

[hmc]
n_samples = 32
"#;

fn write_small(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("small.toml");
    std::fs::write(&path, SMALL).unwrap();
    path
}

#[test]
fn run_writes_artifacts_and_plot() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_small(tmp.path());
    let out = lodegp(
        &[
            "run",
            config.to_str().unwrap(),
            "--plot",
            "--out",
            "artifacts",
        ],
        tmp.path(),
    );
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let dir = tmp.path().join("artifacts");
    let csv = std::fs::read_to_string(dir.join("trajectory.csv")).unwrap();
    assert!(csv.starts_with("t,x1,x2,u1\n"));
    assert_eq!(csv.lines().count(), 14);

    let metrics: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("metrics.json")).unwrap()).unwrap();
    assert!(metrics["constraint_error"].is_number());
    assert!(metrics["control_error"].is_number());
    assert!(metrics["runtime_seconds"].is_number());

    let svg = std::fs::read_to_string(dir.join("plot.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
}

#[test]
fn same_seed_gives_byte_identical_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_small(tmp.path());
    for out_dir in ["a", "b"] {
        let out = lodegp(
            &["run", config.to_str().unwrap(), "--out", out_dir],
            tmp.path(),
        );
        assert!(out.status.success());
    }
    let a = std::fs::read(tmp.path().join("a/trajectory.csv")).unwrap();
    let b = std::fs::read(tmp.path().join("b/trajectory.csv")).unwrap();
    assert_eq!(a, b, "same config and seed must reproduce bytes");

    let c = lodegp(
        &["run", config.to_str().unwrap(), "--seed", "6", "--out", "c"],
        tmp.path(),
    );
    assert!(c.status.success());
    let c = std::fs::read(tmp.path().join("c/trajectory.csv")).unwrap();
    assert_ne!(a, c, "a different seed must change the sampled run");
}

#[test]
fn model_override_changes_variant() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_small(tmp.path());
    let out = lodegp(
        &[
            "run",
            config.to_str().unwrap(),
            "--model",
            "gpse",
            "--out",
            "gpse_run",
        ],
        tmp.path(),
    );
    assert!(out.status.success());
    let metrics: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(tmp.path().join("gpse_run/metrics.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(metrics["model"], "gpse");
    assert_eq!(metrics["hyperparameters"][0]["kind"], "se");
}

#[test]
fn inverted_bounds_fail_with_diagnostic() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("bad.toml");
    std::fs::write(
        &path,
        SMALL.replace(
            "x1 = { lower = -1.0, upper = 1.0 }",
            "x1 = { lower = 1.0, upper = -1.0 }",
        ),
    )
    .unwrap();
    let out = lodegp(&["run", path.to_str().unwrap()], tmp.path());
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.starts_with("error:"), "stderr: {stderr}");
}

#[test]
fn unknown_config_key_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("bad.toml");
    std::fs::write(&path, format!("{SMALL}\nmystery = 1\n")).unwrap();
    let out = lodegp(&["run", path.to_str().unwrap()], tmp.path());
    assert!(!out.status.success());
}

#[test]
fn missing_config_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let out = lodegp(&["run", "nope.toml"], tmp.path());
    assert!(!out.status.success());
}

#[test]
fn report_renders_grouped_table() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_small(tmp.path());
    for (model, dir) in [("gpm", "m1"), ("gpmos", "m2")] {
        let out = lodegp(
            &[
                "run",
                config.to_str().unwrap(),
                "--model",
                model,
                "--out",
                dir,
            ],
            tmp.path(),
        );
        assert!(out.status.success());
    }
    let out = lodegp(
        &["report", "m1/metrics.json", "m2/metrics.json"],
        tmp.path(),
    );
    assert!(out.status.success());
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(table.contains("smoke"));
    assert!(table.contains("constraint error"));
    assert!(table.contains("gpm") && table.contains("gpmos"));

    let bad = lodegp(&["report", "missing.json"], tmp.path());
    assert!(!bad.status.success());
}

#[test]
fn parallel_jobs_run_multiple_configs() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a.toml");
    let b = tmp.path().join("b.toml");
    std::fs::write(&a, SMALL.replace("name = \"smoke\"", "name = \"job_a\"")).unwrap();
    std::fs::write(&b, SMALL.replace("name = \"smoke\"", "name = \"job_b\"")).unwrap();
    let out = lodegp(
        &[
            "run",
            a.to_str().unwrap(),
            b.to_str().unwrap(),
            "--jobs",
            "2",
            "--out",
            "batch",
        ],
        tmp.path(),
    );
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(tmp.path().join("batch/a/metrics.json").exists());
    assert!(tmp.path().join("batch/b/metrics.json").exists());
}
