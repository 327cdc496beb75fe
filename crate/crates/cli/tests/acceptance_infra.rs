//! Acceptance criterion 11 (infrastructure): identical configurations
//! reproduce byte-identical CSV output. The numbered physics criteria live
//! in the core crate's acceptance suite.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cubicgate"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cubicgate-acc-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn criterion_11_reproducible_csv() {
    let t = Instant::now();
    let dir = temp_dir("repro");
    let cfg = dir.join("sweep.toml");
    // A reduced grid keeps the infrastructure check quick; determinism is
    // representation-level, not resolution-level.
    std::fs::write(
        &cfg,
        "[sweep]\nre_alpha_start = -1.0\nre_alpha_stop = 1.0\nre_alpha_step = 0.5\nwith_benchmark = false\n",
    )
    .unwrap();

    let mut csvs = Vec::new();
    for run in ["a", "b"] {
        let out_dir = dir.join(run);
        let out = bin()
            .args(["sweep"])
            .arg("--config")
            .arg(&cfg)
            .arg("--out-dir")
            .arg(&out_dir)
            .output()
            .unwrap();
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
        csvs.push(std::fs::read(out_dir.join("sweep.csv")).unwrap());
    }
    let pass = csvs[0] == csvs[1];
    println!(
        "acceptance 11 byte-identical CSV across reruns: {} ({:.2}s)",
        if pass { "PASS" } else { "FAIL" },
        t.elapsed().as_secs_f64()
    );
    assert!(pass, "CSV bytes differ between identical runs");

    // Header is byte-exact as specified.
    let text = String::from_utf8(csvs[0].clone()).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "re_alpha,mean_x,mean_p,mean_x2,mean_p2,purity,ideal_p,bench_p2,margin"
    );
}

#[test]
fn sweep_outputs_and_env_var_dir() {
    let dir = temp_dir("envvar");
    let cfg = dir.join("sweep.toml");
    std::fs::write(
        &cfg,
        "[sweep]\nre_alpha_start = -0.5\nre_alpha_stop = 0.5\nre_alpha_step = 0.25\nwith_benchmark = false\n",
    )
    .unwrap();
    let out_dir = dir.join("from-env");
    let out = bin()
        .args(["sweep"])
        .arg("--config")
        .arg(&cfg)
        .env("CUBICGATE_OUT", &out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    for name in [
        "sweep.csv",
        "manifest.json",
        "first_moments_gate_x.dat",
        "first_moments_gate_p.dat",
        "first_moments_ideal_x.dat",
        "first_moments_ideal_p.dat",
        "second_moments_gate_x2.dat",
        "second_moments_gate_p2.dat",
        "plot.gp",
    ] {
        assert!(out_dir.join(name).exists(), "missing output {name}");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["conventions"].as_str(), Some("conventions-1"));
    assert!(manifest["chi_eff"].as_f64().is_some());
    assert_eq!(manifest["rows"].as_array().unwrap().len(), 5);
}

#[test]
fn benchmark_chi_eff_fits_from_manifest() {
    let dir = temp_dir("fitfrom");
    let cfg = dir.join("sweep.toml");
    std::fs::write(
        &cfg,
        "[sweep]\nre_alpha_start = -2.0\nre_alpha_stop = 2.0\nre_alpha_step = 0.5\nwith_benchmark = false\n",
    )
    .unwrap();
    let out_dir = dir.join("out");
    let out = bin()
        .args(["sweep"])
        .arg("--config")
        .arg(&cfg)
        .arg("--out-dir")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success());

    let out = bin()
        .args(["benchmark", "--alpha-re", "1.0", "--fit-from"])
        .arg(out_dir.join("manifest.json"))
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let chi_eff = doc["chi_eff"].as_f64().unwrap();
    assert!((0.07..=0.13).contains(&chi_eff), "fitted chi_eff {chi_eff}");
}
