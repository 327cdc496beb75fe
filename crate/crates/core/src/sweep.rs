//! The headline experiment: apply the deterministic gate to a family of
//! coherent probe states, fit the effective cubic nonlinearity from the
//! first moments, and run the per-input Gaussian benchmark against the
//! fitted target.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::benchmark::{estimate_chi_eff, optimize_benchmark, BenchmarkConfig};
use crate::fock::{self, coherent};
use crate::gate::{run_deterministic, GateConfig};
use crate::par;
use crate::{Result, SimError};

/// Probe-sweep configuration. Defaults reproduce the shipped headline
/// experiment: Re α from −2 to 2 in steps of 0.25, Im α = 0, χ = 0.03,
/// g = 1, λ = 1.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub re_alpha_start: f64,
    pub re_alpha_stop: f64,
    pub re_alpha_step: f64,
    pub im_alpha: f64,
    pub gate: GateConfig,
    pub benchmark: BenchmarkConfig,
    /// Run the per-α Gaussian benchmark and fill the margin column.
    pub with_benchmark: bool,
    /// Permit probe amplitudes beyond |α| = 2.
    pub allow_large_alpha: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            re_alpha_start: -2.0,
            re_alpha_stop: 2.0,
            re_alpha_step: 0.25,
            im_alpha: 0.0,
            gate: GateConfig::default(),
            benchmark: BenchmarkConfig::default(),
            with_benchmark: true,
            allow_large_alpha: false,
        }
    }
}

impl SweepConfig {
    pub fn alphas(&self) -> Result<Vec<f64>> {
        if self.re_alpha_step <= 0.0 || !self.re_alpha_step.is_finite() {
            return Err(SimError::Domain { field: "re_alpha_step", value: self.re_alpha_step, reason: "step must be positive" });
        }
        if self.re_alpha_stop < self.re_alpha_start {
            return Err(SimError::Domain { field: "re_alpha_stop", value: self.re_alpha_stop, reason: "empty range" });
        }
        let n = ((self.re_alpha_stop - self.re_alpha_start) / self.re_alpha_step).round() as usize + 1;
        let values: Vec<f64> = (0..n).map(|i| self.re_alpha_start + i as f64 * self.re_alpha_step).collect();
        if !self.allow_large_alpha {
            for &re in &values {
                let amp = (re * re + self.im_alpha * self.im_alpha).sqrt();
                if amp > 2.0 + 1e-12 {
                    return Err(SimError::Domain {
                        field: "re_alpha",
                        value: re,
                        reason: "probe amplitude beyond |α| = 2; set the override to allow it",
                    });
                }
            }
        }
        Ok(values)
    }
}

/// One row of the sweep table.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub re_alpha: f64,
    /// Gate-output moments.
    pub mean_x: f64,
    pub mean_p: f64,
    pub mean_x2: f64,
    pub mean_p2: f64,
    pub purity: f64,
    /// Input moments the targets are computed from.
    pub input_x: f64,
    pub input_p: f64,
    pub input_x2: f64,
    pub input_p2: f64,
    /// Ideal-map target ⟨p̂⟩ + χ_eff⟨x̂²⟩ (filled after the global fit).
    pub ideal_p: f64,
    /// Benchmark output ⟨p̂′²⟩ and its margin over the gate, when run.
    pub bench_p2: Option<f64>,
    pub margin: Option<f64>,
    pub bench_lambda: Option<f64>,
    pub bench_kappa: Option<f64>,
}

/// Sweep outcome: the rows, the globally fitted χ_eff, and wall-clock
/// timings in seconds.
#[derive(Debug, Clone, Serialize)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub chi_eff: f64,
    pub gate_seconds: f64,
    pub benchmark_seconds: f64,
}

fn at_alpha(re_alpha: f64, err: SimError) -> SimError {
    SimError::Solver(format!("sweep failed at re_alpha = {re_alpha}: {err}"))
}

/// Run the probe sweep: deterministic gate per α, global χ_eff fit,
/// ideal targets, and (optionally) the per-α optimized Gaussian benchmark.
/// Rows come out sorted by re_alpha.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutcome> {
    cfg.gate.validate()?;
    let alphas = cfg.alphas()?;
    let dim = cfg.gate.signal_dim;

    let t0 = std::time::Instant::now();
    let gate_rows: Vec<Result<SweepRow>> = par::map_collect(&alphas, |&re| {
        let input = coherent(C64::new(re, cfg.im_alpha), dim).map_err(|e| at_alpha(re, e))?;
        let m_in = fock::moments_pure(&input).map_err(|e| at_alpha(re, e))?;
        let out = run_deterministic(&input, &cfg.gate).map_err(|e| at_alpha(re, e))?;
        Ok(SweepRow {
            re_alpha: re,
            mean_x: out.report.mean_x,
            mean_p: out.report.mean_p,
            mean_x2: out.report.mean_x2,
            mean_p2: out.report.mean_p2,
            purity: out.report.purity,
            input_x: m_in.mean_x,
            input_p: m_in.mean_p,
            input_x2: m_in.mean_x2,
            input_p2: m_in.mean_p2,
            ideal_p: f64::NAN,
            bench_p2: None,
            margin: None,
            bench_lambda: None,
            bench_kappa: None,
        })
    });
    let mut rows: Vec<SweepRow> = gate_rows.into_iter().collect::<Result<_>>()?;
    let gate_seconds = t0.elapsed().as_secs_f64();

    // Global effective-nonlinearity fit through the gate's own data.
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.input_x2, r.mean_p - r.input_p)).collect();
    let chi_eff = estimate_chi_eff(&points)?;
    for row in rows.iter_mut() {
        row.ideal_p = row.input_p + chi_eff * row.input_x2;
    }

    let t1 = std::time::Instant::now();
    if cfg.with_benchmark {
        let bench: Vec<Result<(f64, f64, f64, f64)>> = par::map_collect(&alphas, |&re| {
            let input = coherent(C64::new(re, cfg.im_alpha), cfg.benchmark.dim).map_err(|e| at_alpha(re, e))?;
            let out = optimize_benchmark(&input, chi_eff, &cfg.benchmark).map_err(|e| at_alpha(re, e))?;
            Ok((out.report.mean_p2, out.lambda_opt, out.kappa_opt, out.mean_bias))
        });
        for (row, b) in rows.iter_mut().zip(bench) {
            let (p2, lambda, kappa, _bias) = b?;
            row.bench_p2 = Some(p2);
            row.margin = Some(p2 - row.mean_p2);
            row.bench_lambda = Some(lambda);
            row.bench_kappa = Some(kappa);
        }
    }
    let benchmark_seconds = t1.elapsed().as_secs_f64();

    rows.sort_by(|a, b| a.re_alpha.partial_cmp(&b.re_alpha).unwrap());
    Ok(SweepOutcome { rows, chi_eff, gate_seconds, benchmark_seconds })
}
