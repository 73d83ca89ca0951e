//! End-to-end tests of the `netexp` binary and its file formats.

use std::fs;
use std::process::Command;

fn netexp() -> Command {
    Command::new(env!("CARGO_BIN_EXE_netexp"))
}

const TINY_CONFIG: &str = r#"
base_seed = 5
replications = 8
estimators = ["diff_in_means", "hajek"]

[graph]
kind = "small_world"
n = 40
k = 4
p_rewire = [0.1]

[clustering]
method = "epsilon_net"
epsilon = 2

[[designs]]
name = "gcr"
kind = "graph_cluster"
q = 0.5

[[designs]]
name = "ind"
kind = "independent"
q = 0.5

[response]
alpha = -1.0
beta = [0.5]
gamma = [0.5]
steps = 2
link = "probit"

[exposure]
lambdas = [0.5]

[output]
dir = "OUTDIR"
"#;

#[test]
fn validate_run_report_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("results");
    let config_path = dir.path().join("exp.toml");
    fs::write(
        &config_path,
        TINY_CONFIG.replace("OUTDIR", out_dir.to_str().unwrap()),
    )
    .unwrap();

    let status = netexp().arg("validate").arg(&config_path).status().unwrap();
    assert!(status.success());

    let output = netexp().arg("run").arg(&config_path).output().unwrap();
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    for file in [
        "replications.csv",
        "truth.csv",
        "summary.csv",
        "plot_data.csv",
        "run_metadata.json",
    ] {
        assert!(out_dir.join(file).exists(), "missing {file}");
    }

    // replications.csv: header + cells x reps x designs x estimators rows.
    let text = fs::read_to_string(out_dir.join("replications.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 8 * 2 * 2);
    assert_eq!(
        text.lines().next().unwrap(),
        "graph_kind,graph_param,beta,gamma,replication,design,estimator,estimate,defined"
    );

    // Metadata pins the generator and seed for reproducibility.
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("run_metadata.json")).unwrap())
            .unwrap();
    assert_eq!(meta["base_seed"], 5);
    assert!(meta["rng"].as_str().unwrap().contains("chacha12"));

    // Report regenerates the summary from the stored tables.
    let before = fs::read(out_dir.join("summary.csv")).unwrap();
    fs::remove_file(out_dir.join("summary.csv")).unwrap();
    let output = netexp().arg("report").arg(&out_dir).output().unwrap();
    assert!(output.status.success());
    assert_eq!(fs::read(out_dir.join("summary.csv")).unwrap(), before);
    assert!(String::from_utf8_lossy(&output.stdout).contains("diff_in_means"));
}

#[test]
fn truth_subcommand_writes_truth_table() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("truth-only");
    let config_path = dir.path().join("exp.toml");
    fs::write(
        &config_path,
        TINY_CONFIG.replace("OUTDIR", out_dir.to_str().unwrap()),
    )
    .unwrap();

    let output = netexp().arg("truth").arg(&config_path).output().unwrap();
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    assert!(out_dir.join("truth.csv").exists());
    assert!(!out_dir.join("replications.csv").exists());
    let text = fs::read_to_string(out_dir.join("truth.csv")).unwrap();
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn invalid_configs_fail_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("bad.toml");

    // Unknown key.
    fs::write(
        &config_path,
        TINY_CONFIG.replace("base_seed = 5", "base_seed = 5\nwat = 1"),
    )
    .unwrap();
    let output = netexp().arg("validate").arg(&config_path).output().unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("wat"));

    // Invalid value.
    fs::write(&config_path, TINY_CONFIG.replace("q = 0.5", "q = 2.0")).unwrap();
    let output = netexp().arg("validate").arg(&config_path).output().unwrap();
    assert!(!output.status.success());
}

#[test]
fn worker_cap_environment_variable_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("exp.toml");

    let run = |workers: &str, out: &str| {
        let out_dir = dir.path().join(out);
        fs::write(
            &config_path,
            TINY_CONFIG.replace("OUTDIR", out_dir.to_str().unwrap()),
        )
        .unwrap();
        let output = netexp()
            .arg("run")
            .arg(&config_path)
            .env("NETEXP_WORKERS", workers)
            .output()
            .unwrap();
        assert!(
            output.status.success(),
            "{}",
            String::from_utf8_lossy(&output.stderr)
        );
        fs::read(out_dir.join("replications.csv")).unwrap()
    };
    assert_eq!(run("1", "w1"), run("3", "w3"));
}
