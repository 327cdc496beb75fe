//! Deterministic file outputs: the sweep CSV (fixed header, 12 significant
//! digits), the JSON run manifest, per-panel plot-data series, and a
//! generated gnuplot script.

use std::path::{Path, PathBuf};

use serde::Serialize;

use cubic_core::sweep::{SweepOutcome, SweepRow};

use crate::config::FileConfig;
use crate::{CliError, CliResult};

pub const CSV_HEADER: &str = "re_alpha,mean_x,mean_p,mean_x2,mean_p2,purity,ideal_p,bench_p2,margin";

/// 12 significant digits, plain C locale, scientific notation.
pub fn fmt12(x: f64) -> String {
    format!("{x:.11e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt12).unwrap_or_default()
}

/// Render the sweep table with the byte-exact header.
pub fn render_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            fmt12(r.re_alpha),
            fmt12(r.mean_x),
            fmt12(r.mean_p),
            fmt12(r.mean_x2),
            fmt12(r.mean_p2),
            fmt12(r.purity),
            fmt12(r.ideal_p),
            fmt_opt(r.bench_p2),
            fmt_opt(r.margin),
        ));
    }
    out
}

#[derive(Serialize)]
struct Manifest<'a> {
    schema_version: u32,
    conventions: &'static str,
    config: &'a FileConfig,
    chi_eff: f64,
    gate_seconds: f64,
    benchmark_seconds: f64,
    rows: &'a [SweepRow],
}

/// The run manifest: full configuration, convention-sheet version, fitted
/// χ_eff, timings, and the full row data (richer than the CSV).
pub fn render_manifest(config: &FileConfig, outcome: &SweepOutcome) -> CliResult<String> {
    let manifest = Manifest {
        schema_version: crate::config::SCHEMA_VERSION,
        conventions: "conventions-1",
        config,
        chi_eff: outcome.chi_eff,
        gate_seconds: outcome.gate_seconds,
        benchmark_seconds: outcome.benchmark_seconds,
        rows: &outcome.rows,
    };
    serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::runtime(format!("manifest serialization failed: {e}")))
}

fn two_column(rows: &[SweepRow], f: impl Fn(&SweepRow) -> Option<f64>) -> String {
    let mut out = String::new();
    for r in rows {
        if let Some(y) = f(r) {
            out.push_str(&format!("{} {}\n", fmt12(r.re_alpha), fmt12(y)));
        }
    }
    out
}

/// The generated plotting script (gnuplot).
fn plot_script(with_benchmark: bool) -> String {
    let mut s = String::from(
        "set terminal pngcairo size 900,1200\n\
         set output 'moments.png'\n\
         set multiplot layout 2,1\n\
         set xlabel 'Re alpha'\n\
         set ylabel 'first moments'\n\
         plot 'first_moments_gate_x.dat' with points pt 2 title 'gate <x>', \\\n\
              'first_moments_gate_p.dat' with points pt 2 lc rgb 'red' title 'gate <p>', \\\n\
              'first_moments_ideal_x.dat' with lines lc rgb 'blue' title 'ideal <x>', \\\n\
              'first_moments_ideal_p.dat' with lines lc rgb 'red' title 'ideal <p>'\n\
         set ylabel 'second moments'\n\
         plot 'second_moments_gate_x2.dat' with points pt 2 lc rgb 'blue' title 'gate <x^2>', \\\n\
              'second_moments_gate_p2.dat' with points pt 2 lc rgb 'red' title 'gate <p^2>'",
    );
    if with_benchmark {
        s.push_str(", \\\n              'second_moments_bench_p2.dat' with points pt 6 lc rgb 'dark-red' title 'Gaussian <p^2>'");
    }
    s.push_str("\nunset multiplot\n");
    s
}

/// Write CSV, manifest, plot-data series, and the plotting script into
/// `out_dir`. Refuses an empty row set.
pub fn emit_outputs(config: &FileConfig, outcome: &SweepOutcome, out_dir: &Path) -> CliResult<Vec<PathBuf>> {
    if outcome.rows.is_empty() {
        return Err(CliError::runtime("refusing to emit outputs for an empty sweep"));
    }
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", out_dir.display())))?;
    let write = |name: &str, contents: String| -> CliResult<PathBuf> {
        let path = out_dir.join(name);
        std::fs::write(&path, contents)
            .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    };

    let rows = &outcome.rows;
    let with_benchmark = rows.iter().all(|r| r.bench_p2.is_some());
    let mut written = vec![
        write("sweep.csv", render_csv(rows))?,
        write("manifest.json", render_manifest(config, outcome)?)?,
        write("first_moments_gate_x.dat", two_column(rows, |r| Some(r.mean_x)))?,
        write("first_moments_gate_p.dat", two_column(rows, |r| Some(r.mean_p)))?,
        write("first_moments_ideal_x.dat", two_column(rows, |r| Some(r.input_x)))?,
        write("first_moments_ideal_p.dat", two_column(rows, |r| Some(r.ideal_p)))?,
        write("second_moments_gate_x2.dat", two_column(rows, |r| Some(r.mean_x2)))?,
        write("second_moments_gate_p2.dat", two_column(rows, |r| Some(r.mean_p2)))?,
    ];
    if with_benchmark {
        written.push(write("second_moments_bench_p2.dat", two_column(rows, |r| r.bench_p2))?);
    }
    written.push(write("plot.gp", plot_script(with_benchmark))?);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(re: f64) -> SweepRow {
        SweepRow {
            re_alpha: re,
            mean_x: 2f64.sqrt() * re,
            mean_p: 0.1,
            mean_x2: 2.0 * re * re + 0.5,
            mean_p2: 1.0,
            purity: 0.7,
            input_x: 2f64.sqrt() * re,
            input_p: 0.0,
            input_x2: 2.0 * re * re + 0.5,
            input_p2: 0.5,
            ideal_p: 0.08,
            bench_p2: Some(1.1),
            margin: Some(0.1),
            bench_lambda: Some(0.7),
            bench_kappa: Some(0.2),
        }
    }

    #[test]
    fn header_is_byte_exact() {
        let csv = render_csv(&[row(0.5)]);
        let first = csv.lines().next().unwrap();
        assert_eq!(first, "re_alpha,mean_x,mean_p,mean_x2,mean_p2,purity,ideal_p,bench_p2,margin");
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt12(0.031819805153), "3.18198051530e-2");
        assert_eq!(fmt12(1.0), "1.00000000000e0");
    }

    #[test]
    fn rendering_is_deterministic() {
        let rows = vec![row(-0.25), row(0.0), row(0.25)];
        assert_eq!(render_csv(&rows), render_csv(&rows));
    }

    #[test]
    fn missing_benchmark_leaves_empty_cells() {
        let mut r = row(1.0);
        r.bench_p2 = None;
        r.margin = None;
        let csv = render_csv(&[r]);
        assert!(csv.lines().nth(1).unwrap().ends_with(",,"));
    }

    #[test]
    fn empty_rows_are_refused() {
        let outcome = SweepOutcome { rows: vec![], chi_eff: 0.0, gate_seconds: 0.0, benchmark_seconds: 0.0 };
        let cfg = crate::config::FileConfig::default();
        let dir = std::env::temp_dir().join(format!("cubicgate-empty-{}", std::process::id()));
        let err = emit_outputs(&cfg, &outcome, &dir).unwrap_err();
        assert_eq!(err.code, 1);
    }
}
