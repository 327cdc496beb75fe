//! The strongest Gaussian imposter of the gate: a vacuum-ancilla QND
//! coupling, homodyne readout, and a quadratic feed-forward displacement
//! κq² on the momentum quadrature, per-input optimized over the QND gain.
//!
//! The feed-forward gain used by the optimizer is the estimator gain
//! κ = χ_eff/λ² (the measured q estimates −λx̂, so κq² transduces
//! χ_eff·x̂² plus meter noise). The meter's vacuum noise passed through
//! the square leaves a known state-independent bias χ_eff/(2λ²) on
//! ⟨p̂′⟩, which is reported, not hidden; it is also what makes small λ
//! expensive and the noise profile U-shaped.

use crate::fock::{self, DensityMatrix, FockVector, MomentReport};
use crate::gate::{assemble_mixture, HomodyneRecord, QGrid};
use crate::grid::{to_grid, GridSpec, GridWavefunction};
use crate::quadrature::QuadRule;
use crate::resource::ResourceWavefunction;
use crate::{Result, SimError};

use num_complex::Complex64 as C64;

/// Configuration of the Gaussian benchmark optimization.
#[derive(Debug, Clone, Copy)]
pub struct BenchmarkConfig {
    /// QND gain scan interval (0 excluded: λ = 0 carries no information).
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Coarse scan resolution before golden-section refinement.
    pub coarse_points: usize,
    /// Golden-section tolerance in λ.
    pub golden_tol: f64,
    pub q_grid: QGrid,
    pub grid: GridSpec,
    /// Truncation for the final density matrix.
    pub dim: usize,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            lambda_min: 0.05,
            lambda_max: 2.5,
            coarse_points: 25,
            golden_tol: 1e-6,
            q_grid: QGrid { min: -18.0, max: 18.0, nodes: 361 },
            grid: GridSpec::default(),
            dim: crate::DEFAULT_DIM,
        }
    }
}

impl BenchmarkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lambda_min <= 0.0 || !self.lambda_min.is_finite() {
            return Err(SimError::Domain {
                field: "lambda_min",
                value: self.lambda_min,
                reason: "the scan must exclude λ = 0 (no information at zero gain)",
            });
        }
        if self.lambda_max <= self.lambda_min || !self.lambda_max.is_finite() {
            return Err(SimError::Domain { field: "lambda_max", value: self.lambda_max, reason: "empty scan range" });
        }
        if self.coarse_points < 25 {
            return Err(SimError::InvalidDimension { dim: self.coarse_points, reason: "coarse scan needs at least 25 points" });
        }
        Ok(())
    }
}

/// Outcome of the per-input benchmark optimization.
#[derive(Debug, Clone)]
pub struct BenchmarkResult {
    pub lambda_opt: f64,
    pub kappa_opt: f64,
    pub report: MomentReport,
    /// ⟨p̂′²⟩ minus the ideal-map reference ⟨(p̂ + χ_eff x̂²)²⟩ on the input.
    pub added_noise: f64,
    /// ⟨p̂′⟩ − (⟨p̂⟩ + χ_eff⟨x̂²⟩): the meter-noise bias χ_eff/(2λ²).
    pub mean_bias: f64,
    /// Set when the minimizer sits on the scan boundary (range too narrow).
    pub boundary: bool,
    pub records: Vec<HomodyneRecord>,
}

fn vacuum_ancilla() -> ResourceWavefunction {
    ResourceWavefunction { chi: 0.0, g: 1.0, norm: 1.0 }
}

/// One Gaussian branch: ψ(x)·φ₀(q + λx)·e^{iκq²x}.
fn gaussian_branch(input: &GridWavefunction, lambda: f64, kappa: f64, q: f64) -> GridWavefunction {
    let ancilla = vacuum_ancilla();
    let spec = input.spec;
    let samples = input
        .samples
        .iter()
        .enumerate()
        .map(|(j, psi)| {
            let x = spec.x_at(j);
            let phi = ancilla.eval(q + lambda * x);
            let phase = C64::new(0.0, kappa * q * q * x).exp();
            psi * phi * phase
        })
        .collect();
    GridWavefunction { spec, samples }
}

/// The Gaussian scheme as a full channel: QND shear with gain λ on a vacuum
/// ancilla, homodyne over q, p-displacement by κq² on each branch, mixed
/// state assembled exactly as in the deterministic gate.
pub fn gaussian_map(
    input: &FockVector,
    lambda: f64,
    kappa: f64,
    cfg: &BenchmarkConfig,
) -> Result<(DensityMatrix, Vec<HomodyneRecord>)> {
    input.check_normalized()?;
    let input_wf = to_grid(input, cfg.grid)?;
    let rule = cfg.q_grid.rule()?;
    let parts = assemble_mixture(
        &rule,
        |q| gaussian_branch(&input_wf, lambda, kappa, q),
        cfg.dim,
        true,
    )?;
    if parts.captured < 1.0 - 1e-4 {
        return Err(SimError::MassDeficit { mass: parts.captured, required: 1.0 - 1e-4 });
    }
    let rho_raw = parts.rho_raw.expect("density requested");
    let rho = DensityMatrix { entries: rho_raw * C64::new(1.0 / parts.raw_trace, 0.0) };
    Ok((rho, parts.records))
}

/// Grid-side output moments of the Gaussian scheme (no density assembly);
/// the fast path for the optimizer. Purity is not defined on this path and
/// is reported as 1 (the field is unused by the optimizer).
pub fn gaussian_map_moments(
    input_wf: &GridWavefunction,
    lambda: f64,
    kappa: f64,
    rule: &QuadRule,
) -> Result<MomentReport> {
    let parts = assemble_mixture(rule, |q| gaussian_branch(input_wf, lambda, kappa, q), 0, false)?;
    if parts.captured < 1.0 - 1e-4 {
        return Err(SimError::MassDeficit { mass: parts.captured, required: 1.0 - 1e-4 });
    }
    let t = parts.captured;
    Ok(MomentReport {
        mean_x: parts.grid_moments.x1 / t,
        mean_p: parts.grid_moments.p1 / t,
        mean_x2: parts.grid_moments.x2 / t,
        mean_p2: parts.grid_moments.p2 / t,
        purity: 1.0,
    })
}

/// Solve for the κ that puts the output mean exactly on the ideal-map
/// target ⟨p̂′⟩ = ⟨p̂⟩ + χ_eff·⟨x̂²⟩ at this λ. ⟨p̂′⟩ is affine in κ, so the
/// secant step lands in one iteration; three are allowed before declaring
/// failure.
pub fn solve_kappa(input: &FockVector, lambda: f64, chi_eff: f64, cfg: &BenchmarkConfig) -> Result<f64> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(SimError::Domain { field: "lambda", value: lambda, reason: "QND gain must be nonzero" });
    }
    let m_in = fock::moments_pure(input)?;
    let target = m_in.mean_p + chi_eff * m_in.mean_x2;
    let input_wf = to_grid(input, cfg.grid)?;
    let rule = cfg.q_grid.rule()?;
    let eval = |kappa: f64| -> Result<f64> {
        Ok(gaussian_map_moments(&input_wf, lambda, kappa, &rule)?.mean_p)
    };

    let mut k0 = 0.0;
    let mut f0 = eval(k0)? - target;
    if f0.abs() < 1e-12 {
        return Ok(0.0);
    }
    let mut k1 = if chi_eff != 0.0 { chi_eff } else { 1e-3 };
    let mut f1 = eval(k1)? - target;
    for _ in 0..3 {
        if (f1 - f0).abs() < 1e-300 {
            break;
        }
        let k2 = k1 - f1 * (k1 - k0) / (f1 - f0);
        let f2 = eval(k2)? - target;
        k0 = k1;
        f0 = f1;
        k1 = k2;
        f1 = f2;
        if f1.abs() < 1e-9 {
            return Ok(k1);
        }
    }
    if f1.abs() < 1e-6 {
        Ok(k1)
    } else {
        Err(SimError::Solver(format!(
            "kappa secant did not converge: residual {f1:.3e} (affinity violated?)"
        )))
    }
}

/// Golden-section search for the minimum of `f` on `[a, b]`.
fn golden_section_minimize(
    f: impl Fn(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while (b - a) > tol {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
    }
    if f1 < f2 {
        Ok((x1, f1))
    } else {
        Ok((x2, f2))
    }
}

/// ⟨(p̂ + χ_eff·x̂²)²⟩ on the input: the ideal-map second-moment reference.
pub fn ideal_map_p2(input: &FockVector, chi_eff: f64) -> Result<f64> {
    input.check_normalized()?;
    let dim = input.dim();
    let (x, p) = fock::quadratures(dim)?;
    let x2 = x.dot(&x);
    let shifted = crate::fock::OperatorMatrix {
        matrix: &p.matrix + &(&x2.matrix * C64::new(chi_eff, 0.0)),
    };
    let sq = shifted.dot(&shifted);
    Ok(sq.expectation(input)?.re)
}

/// Per-input optimization of the Gaussian imposter: scan λ (coarse grid,
/// then golden-section), with the estimator gain κ = χ_eff/λ², minimizing
/// the output ⟨p̂′²⟩. The small-λ side is penalized by the meter-noise bias
/// entering ⟨p̂′²⟩ through the mean; the large-λ side by QND back-action.
pub fn optimize_benchmark(input: &FockVector, chi_eff: f64, cfg: &BenchmarkConfig) -> Result<BenchmarkResult> {
    cfg.validate()?;
    input.check_normalized()?;
    let input_wf = to_grid(input, cfg.grid)?;
    let rule = cfg.q_grid.rule()?;
    let kappa_of = |lambda: f64| chi_eff / (lambda * lambda);
    let objective = |lambda: f64| -> Result<f64> {
        Ok(gaussian_map_moments(&input_wf, lambda, kappa_of(lambda), &rule)?.mean_p2)
    };

    // Coarse scan.
    let n = cfg.coarse_points;
    let mut best_idx = 0usize;
    let mut best_val = f64::INFINITY;
    let lambdas: Vec<f64> = (0..n)
        .map(|i| cfg.lambda_min + (cfg.lambda_max - cfg.lambda_min) * i as f64 / (n - 1) as f64)
        .collect();
    for (i, l) in lambdas.iter().enumerate() {
        let v = objective(*l)?;
        if v < best_val {
            best_val = v;
            best_idx = i;
        }
    }

    // Golden-section refinement around the best coarse point.
    let lo = if best_idx == 0 { lambdas[0] } else { lambdas[best_idx - 1] };
    let hi = if best_idx == n - 1 { lambdas[n - 1] } else { lambdas[best_idx + 1] };
    let (lambda_opt, _) = if hi > lo {
        golden_section_minimize(objective, lo, hi, cfg.golden_tol)?
    } else {
        (lambdas[best_idx], best_val)
    };
    let boundary = lambda_opt - cfg.lambda_min < 10.0 * cfg.golden_tol
        || cfg.lambda_max - lambda_opt < 10.0 * cfg.golden_tol;

    let kappa_opt = kappa_of(lambda_opt);
    let (rho, records) = gaussian_map(input, lambda_opt, kappa_opt, cfg)?;
    let report = fock::moments_density(&rho)?;
    let m_in = fock::moments_pure(input)?;
    let target = m_in.mean_p + chi_eff * m_in.mean_x2;
    Ok(BenchmarkResult {
        lambda_opt,
        kappa_opt,
        added_noise: report.mean_p2 - ideal_map_p2(input, chi_eff)?,
        mean_bias: report.mean_p - target,
        boundary,
        report,
        records,
    })
}

/// Least-squares estimate of the effective cubic nonlinearity from sweep
/// data: fit ⟨p̂′⟩ − ⟨p̂⟩ = χ_eff·⟨x̂²⟩ through the measured second moments.
/// `points` holds (⟨x̂²⟩, ⟨p̂′⟩ − ⟨p̂⟩) pairs.
pub fn estimate_chi_eff(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 5 {
        return Err(SimError::Fit(format!("need at least 5 sweep rows, got {}", points.len())));
    }
    let sum_sq: f64 = points.iter().map(|(x2, _)| x2 * x2).sum();
    if sum_sq < 1e-12 {
        return Err(SimError::Fit("design is rank-deficient: all ⟨x̂²⟩ vanish".into()));
    }
    let spread = points.iter().map(|(x2, _)| *x2).fold(f64::NEG_INFINITY, f64::max)
        - points.iter().map(|(x2, _)| *x2).fold(f64::INFINITY, f64::min);
    if spread < 1e-9 {
        return Err(SimError::Fit("design is rank-deficient: no spread in ⟨x̂²⟩".into()));
    }
    let cross: f64 = points.iter().map(|(x2, dp)| x2 * dp).sum();
    Ok(cross / sum_sq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent, moments_pure, FockVector};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn idle_map_is_identity() {
        // κ = 0, λ → 0: no coupling, no feed-forward.
        let input = coherent(c(0.6, 0.0), 48).unwrap();
        let cfg = BenchmarkConfig::default();
        let (rho, _) = gaussian_map(&input, 1e-3, 0.0, &cfg).unwrap();
        let f = rho.fidelity_with_pure(&input).unwrap();
        assert!(f >= 1.0 - 1e-6, "fidelity {f}");
    }

    #[test]
    fn backaction_adds_half_lambda_squared_to_p_variance() {
        // Heisenberg oracle: p̂_S → p̂_S ± λp̂_A with a vacuum ancilla.
        let cfg = BenchmarkConfig::default();
        for input in [FockVector::vacuum(48), coherent(c(1.0, 0.0), 48).unwrap()] {
            let m_in = moments_pure(&input).unwrap();
            for lambda in [0.25, 0.5, 1.0] {
                let (rho, _) = gaussian_map(&input, lambda, 0.0, &cfg).unwrap();
                let m = fock::moments_density(&rho).unwrap();
                let added = m.var_p() - m_in.var_p();
                assert!(
                    (added - lambda * lambda / 2.0).abs() < 1e-4,
                    "lambda {lambda}: added {added}"
                );
                // Var(x) untouched.
                assert!((m.var_x() - m_in.var_x()).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn x_moments_are_exactly_preserved() {
        let input = coherent(c(1.3, 0.0), 48).unwrap();
        let m_in = moments_pure(&input).unwrap();
        let cfg = BenchmarkConfig::default();
        for (lambda, kappa) in [(0.5, 0.0), (1.0, 0.12), (1.7, -0.05)] {
            let (rho, _) = gaussian_map(&input, lambda, kappa, &cfg).unwrap();
            let m = fock::moments_density(&rho).unwrap();
            assert!((m.mean_x - m_in.mean_x).abs() < 1e-6);
            assert!((m.mean_x2 - m_in.mean_x2).abs() < 1e-6);
        }
    }

    #[test]
    fn solve_kappa_zero_target_gives_zero() {
        let input = coherent(c(0.8, 0.0), 48).unwrap();
        let cfg = BenchmarkConfig::default();
        let kappa = solve_kappa(&input, 1.0, 0.0, &cfg).unwrap();
        assert!(kappa.abs() < 1e-12);
    }

    #[test]
    fn output_mean_p_is_affine_in_kappa() {
        // Three-point collinearity oracle.
        let input = coherent(c(0.7, 0.0), 48).unwrap();
        let cfg = BenchmarkConfig::default();
        let input_wf = to_grid(&input, cfg.grid).unwrap();
        let rule = cfg.q_grid.rule().unwrap();
        let p_at = |k: f64| gaussian_map_moments(&input_wf, 0.8, k, &rule).unwrap().mean_p;
        let (p0, p1, p2) = (p_at(0.0), p_at(0.1), p_at(0.2));
        let collinearity = (p2 - p1) - (p1 - p0);
        assert!(collinearity.abs() < 1e-9, "collinearity defect {collinearity:.3e}");
    }

    #[test]
    fn solve_kappa_closes_the_first_moment() {
        let input = FockVector::vacuum(48);
        let cfg = BenchmarkConfig::default();
        let chi_eff = 0.09;
        let kappa = solve_kappa(&input, 1.0, chi_eff, &cfg).unwrap();
        let (rho, _) = gaussian_map(&input, 1.0, kappa, &cfg).unwrap();
        let m = fock::moments_density(&rho).unwrap();
        let m_in = moments_pure(&input).unwrap();
        let target = m_in.mean_p + chi_eff * m_in.mean_x2;
        assert!((m.mean_p - target).abs() < 1e-6, "residual {:.3e}", m.mean_p - target);
    }

    #[test]
    fn estimate_chi_eff_exact_recovery() {
        let points: Vec<(f64, f64)> = (0..9)
            .map(|i| {
                let x2 = 0.5 + 0.9 * i as f64;
                (x2, 0.07 * x2)
            })
            .collect();
        let chi = estimate_chi_eff(&points).unwrap();
        assert!((chi - 0.07).abs() < 1e-10);
    }

    #[test]
    fn estimate_chi_eff_rejects_degenerate_designs() {
        assert!(estimate_chi_eff(&[(1.0, 0.1); 3]).is_err());
        assert!(estimate_chi_eff(&[(1.0, 0.1); 6]).is_err());
        assert!(estimate_chi_eff(&[(0.0, 0.0); 6]).is_err());
    }

    #[test]
    fn optimizer_with_zero_target_hits_small_lambda_boundary() {
        // Doing nothing is optimal: κ ≡ 0, noise = back-action only.
        let input = FockVector::vacuum(48);
        let cfg = BenchmarkConfig::default();
        let out = optimize_benchmark(&input, 0.0, &cfg).unwrap();
        assert!(out.boundary, "expected a flagged boundary minimizer");
        assert!(out.lambda_opt - cfg.lambda_min < 1e-3);
        assert!(out.kappa_opt.abs() < 1e-12);
        assert!((out.report.mean_p2 - 0.5).abs() < 5e-3);
    }

    #[test]
    fn optimizer_finds_interior_minimum_for_cubic_target() {
        // U-shaped trade-off: meter noise at small λ, back-action at large λ.
        let input = coherent(c(1.0, 0.0), 48).unwrap();
        let cfg = BenchmarkConfig::default();
        let out = optimize_benchmark(&input, 0.09, &cfg).unwrap();
        assert!(!out.boundary, "interior optimum expected, got λ* = {}", out.lambda_opt);
        assert!(out.lambda_opt > 0.2 && out.lambda_opt < 2.0, "λ* = {}", out.lambda_opt);
        // The mean bias is the meter systematic χ_eff/(2λ²).
        let expect_bias = 0.09 / (2.0 * out.lambda_opt * out.lambda_opt);
        assert!((out.mean_bias - expect_bias).abs() < 1e-3, "bias {} vs {}", out.mean_bias, expect_bias);
    }

    #[test]
    fn optimizer_is_deterministic() {
        let input = coherent(c(0.5, 0.0), 48).unwrap();
        let cfg = BenchmarkConfig::default();
        let a = optimize_benchmark(&input, 0.09, &cfg).unwrap();
        let b = optimize_benchmark(&input, 0.09, &cfg).unwrap();
        assert!((a.lambda_opt - b.lambda_opt).abs() < 1e-8);
        assert!((a.report.mean_p2 - b.report.mean_p2).abs() < 1e-8);
    }

    #[test]
    fn ideal_map_reference_on_vacuum() {
        // ⟨(p̂ + χx̂²)²⟩ = 1/2 + χ²·⟨x̂⁴⟩ = 1/2 + χ²·3/4 on vacuum.
        let v = FockVector::vacuum(32);
        let chi = 0.1;
        let got = ideal_map_p2(&v, chi).unwrap();
        assert!((got - (0.5 + chi * chi * 0.75)).abs() < 1e-12);
    }
}
