//! End-to-end checks of the command-line interface: exit codes, override
//! flags, and the files a run leaves behind.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_llg-harness"))
}

fn write_config(dir: &Path, body: serde_json::Value) -> std::path::PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(&body).unwrap()).unwrap();
    path
}

fn base_config(out: &Path) -> serde_json::Value {
    serde_json::json!({
        "experiment": "sweep",
        "grid": { "sizes": [16] },
        "params": { "a": 1.0, "epsilons": [0.2, 0.1], "t_final": 0.1, "dt": 0.01 },
        "datum": { "family": "bump", "amplitude": 0.05, "seed": 5 },
        "out_dir": out.join("out"),
    })
}

#[test]
fn a_passing_sweep_exits_zero_and_persists_its_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), base_config(dir.path()));
    let output = bin().args(["sweep", "--config"]).arg(&cfg).output().unwrap();
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(output.status.success(), "stdout {stdout}");
    assert!(stdout.contains("PASS"), "{stdout}");
    assert!(dir.path().join("out/report.ndjson").is_file());
    assert!(dir.path().join("out/plots/error-vs-epsilon.dat").is_file());
}

#[test]
fn overrides_replace_config_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), base_config(dir.path()));
    let out2 = dir.path().join("elsewhere");
    let output = bin()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .args(["--epsilon", "0.5", "--grid", "16", "--T", "0.05", "--dt", "0.005", "--out"])
        .arg(&out2)
        .output()
        .unwrap();
    // The config says "sweep" but the verb is simulate: declared kind wins.
    assert!(!output.status.success());

    let mut body = base_config(dir.path());
    body["experiment"] = serde_json::json!("simulate");
    let cfg = write_config(dir.path(), body);
    let output = bin()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .args(["--epsilon", "0.5", "--T", "0.05", "--dt", "0.005", "--out"])
        .arg(&out2)
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let report = std::fs::read_to_string(out2.join("report.ndjson")).unwrap();
    assert!(report.contains("\"epsilon\":0.5"), "{report}");
    assert!(report.contains("\"t_final\":0.05"), "{report}");
    assert!(out2.join("final-eps-0.5.llgf").is_file());
}

#[test]
fn a_failing_criterion_turns_into_a_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let mut body = base_config(dir.path());
    // An impossible slope window forces a FAIL without breaking the solve.
    body["tolerances"] = serde_json::json!({ "slope_lo": 99.0, "slope_hi": 100.0 });
    let cfg = write_config(dir.path(), body);
    let output = bin().args(["sweep", "--config"]).arg(&cfg).output().unwrap();
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(!output.status.success());
    assert!(stdout.contains("FAIL"), "{stdout}");
    // The report is still written, with the failure recorded.
    let report = std::fs::read_to_string(dir.path().join("out/report.ndjson")).unwrap();
    assert!(report.contains("\"passed\":false"));
}

#[test]
fn an_invalid_config_is_rejected_before_any_solve() {
    let dir = tempfile::tempdir().unwrap();
    let mut body = base_config(dir.path());
    body["params"]["epsilons"] = serde_json::json!([0.1, 0.2]);
    let cfg = write_config(dir.path(), body);
    let output = bin().args(["sweep", "--config"]).arg(&cfg).output().unwrap();
    assert!(!output.status.success());
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("descending"), "{err}");
}
