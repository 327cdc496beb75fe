//! End-to-end tests of the `cubicgate` binary: exit codes, subcommand
//! behavior, and output determinism.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cubicgate"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cubicgate-test-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = temp_dir("unknown-key");
    let cfg = dir.join("bad.toml");
    std::fs::write(&cfg, "[sweep]\nchii = 0.05\n").unwrap();
    let out = bin().args(["compose"]).arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn domain_error_exits_3_and_names_the_field() {
    let dir = temp_dir("domain");
    let cfg = dir.join("zero-g.toml");
    std::fs::write(&cfg, "[gate]\ng = 0.0\n").unwrap();
    let out = bin().args(["gate"]).arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("`g`"), "stderr should name the field: {stderr}");
}

#[test]
fn type_mismatch_exits_3() {
    let dir = temp_dir("type");
    let cfg = dir.join("bad-type.toml");
    std::fs::write(&cfg, "[sweep]\nchi = \"not a number\"\n").unwrap();
    let out = bin().args(["compose"]).arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn missing_config_exits_4() {
    let out = bin()
        .args(["compose", "--config", "/nonexistent/nowhere.toml"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn empty_config_runs_the_defaults() {
    let dir = temp_dir("empty");
    let cfg = dir.join("empty.toml");
    std::fs::write(&cfg, "").unwrap();
    let out = bin().args(["compose"]).arg("--config").arg(&cfg).output().unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["chi"].as_f64(), Some(0.05));
}

#[test]
fn compose_reports_the_factorization() {
    let out = bin().args(["compose", "--chi", "0.08"]).output().unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((doc["beta1"][0].as_f64().unwrap() - 0.04).abs() < 1e-12);
    assert!((doc["sum"][1].as_f64().unwrap() - 0.08).abs() < 1e-12);
}

#[test]
fn resource_reports_recipe_fidelity() {
    let out = bin().args(["resource"]).output().unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let f = doc["recipe"]["fidelity_vs_direct"].as_f64().unwrap();
    assert!(f > 1.0 - 1e-8, "recipe fidelity {f}");
    let residuals = doc["recipe"]["residuals"].as_array().unwrap();
    for r in residuals {
        assert!(r.as_f64().unwrap() < 1e-10);
    }
}

#[test]
fn probabilistic_gate_runs_and_reports_pure_output() {
    let out = bin()
        .args(["gate", "--mode", "probabilistic", "--alpha-re", "0.5", "--g", "100", "--chi", "0.05"])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((doc["output_moments"]["purity"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn gate_sampling_is_reproducible() {
    let run = || {
        let out = bin()
            .args(["gate", "--alpha-re", "0.5", "--sample", "32"])
            .output()
            .unwrap();
        assert!(out.status.success());
        let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        doc["sampled_outcomes"].to_string()
    };
    assert_eq!(run(), run());
}

#[test]
fn benchmark_requires_a_chi_eff_source() {
    let out = bin().args(["benchmark", "--alpha-re", "1.0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn benchmark_reports_margin_against_supplied_gate() {
    let out = bin()
        .args(["benchmark", "--alpha-re", "1.0", "--chi-eff", "0.09", "--gate-p2", "1.0739"])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["lambda_opt"].as_f64().unwrap() > 0.1);
    assert!(doc["margin_vs_gate_p2"].as_f64().is_some());
}
