//! Position-representation states on a uniform grid, the Hermite functions
//! ⟨x|n⟩, and the conversions between grid and Fock representations.
//!
//! Quadrature units throughout: the vacuum wavefunction is
//! π^{−1/4} e^{−x²/2} with ⟨x̂²⟩ = 1/2.

use num_complex::Complex64 as C64;

use crate::fock::FockVector;
use crate::quadrature::trapezoid;
use crate::{Result, SimError, DEFAULT_GRID_BOUNDS, DEFAULT_GRID_POINTS};

/// Uniform grid specification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            x_min: DEFAULT_GRID_BOUNDS.0,
            x_max: DEFAULT_GRID_BOUNDS.1,
            n_points: DEFAULT_GRID_POINTS,
        }
    }
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if n_points < 16 {
            return Err(SimError::InvalidDimension { dim: n_points, reason: "grid needs at least 16 points" });
        }
        if x_max <= x_min || !x_min.is_finite() || !x_max.is_finite() {
            return Err(SimError::Domain { field: "x_max", value: x_max, reason: "requires x_max > x_min" });
        }
        Ok(GridSpec { x_min, x_max, n_points })
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn x_at(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    /// Sampled complex function on this grid.
    pub fn sample(&self, f: impl Fn(f64) -> C64) -> GridWavefunction {
        let samples = (0..self.n_points).map(|i| f(self.x_at(i))).collect();
        GridWavefunction { spec: *self, samples }
    }
}

/// Complex position-space samples on a uniform grid.
#[derive(Debug, Clone)]
pub struct GridWavefunction {
    pub spec: GridSpec,
    pub samples: Vec<C64>,
}

/// Unnormalized grid moment integrals of a wavefunction.
#[derive(Debug, Clone, Copy, Default)]
pub struct RawGridMoments {
    pub norm_sq: f64,
    pub x1: f64,
    pub x2: f64,
    pub p1: f64,
    pub p2: f64,
}

impl GridWavefunction {
    pub fn n_points(&self) -> usize {
        self.spec.n_points
    }

    pub fn dx(&self) -> f64 {
        self.spec.dx()
    }

    pub fn norm_sq(&self) -> f64 {
        let dens: Vec<f64> = self.samples.iter().map(|z| z.norm_sqr()).collect();
        trapezoid(&dens, self.dx())
    }

    /// ⟨self|other⟩ by the trapezoid rule.
    pub fn inner(&self, other: &GridWavefunction) -> Result<C64> {
        if self.spec != other.spec {
            return Err(SimError::DimMismatch { left: self.n_points(), right: other.n_points() });
        }
        let re: Vec<f64> = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a.conj() * b).re)
            .collect();
        let im: Vec<f64> = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a.conj() * b).im)
            .collect();
        Ok(C64::new(trapezoid(&re, self.dx()), trapezoid(&im, self.dx())))
    }

    /// Rescale to unit norm. Fails on effectively-zero input.
    pub fn normalized(&self) -> Result<GridWavefunction> {
        let n2 = self.norm_sq();
        if n2 < 1e-280 {
            return Err(SimError::Annihilated { norm: n2.sqrt() });
        }
        let scale = 1.0 / n2.sqrt();
        let samples = self.samples.iter().map(|z| z * scale).collect();
        Ok(GridWavefunction { spec: self.spec, samples })
    }

    /// Ratio of the larger edge magnitude to the peak magnitude.
    pub fn edge_ratio(&self) -> f64 {
        let peak = self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let edge = self.samples[0].norm().max(self.samples[self.n_points() - 1].norm());
        edge / peak
    }

    /// Enforce the support-window invariant: edge magnitudes below
    /// 1e−6 × peak.
    pub fn check_window(&self) -> Result<()> {
        let r = self.edge_ratio();
        if r >= 1e-6 {
            return Err(SimError::Window(format!(
                "support reaches the grid edge (edge/peak = {r:.3e})"
            )));
        }
        Ok(())
    }

    /// First derivative by a seven-point central stencil (O(h⁶)); samples
    /// beyond the grid are taken as zero (valid for windowed states).
    fn derivative(&self) -> Vec<C64> {
        let n = self.n_points();
        let h = self.dx();
        let s = |i: isize| -> C64 {
            if i < 0 || i >= n as isize {
                C64::new(0.0, 0.0)
            } else {
                self.samples[i as usize]
            }
        };
        (0..n as isize)
            .map(|i| {
                (s(i + 3) - s(i - 3) + (s(i - 2) - s(i + 2)) * 9.0 + (s(i + 1) - s(i - 1)) * 45.0)
                    / (60.0 * h)
            })
            .collect()
    }

    /// Unnormalized moment integrals: ∫|ψ|², ∫x|ψ|², ∫x²|ψ|²,
    /// Im∫ψ*ψ′ and ∫|ψ′|² (the last two are ⟨p̂⟩ and ⟨p̂²⟩ integrals).
    pub fn raw_moments(&self) -> RawGridMoments {
        let n = self.n_points();
        let h = self.dx();
        let deriv = self.derivative();
        let mut dens = vec![0.0; n];
        let mut xd = vec![0.0; n];
        let mut x2d = vec![0.0; n];
        let mut pd = vec![0.0; n];
        let mut p2d = vec![0.0; n];
        for i in 0..n {
            let x = self.spec.x_at(i);
            let d = self.samples[i].norm_sqr();
            dens[i] = d;
            xd[i] = x * d;
            x2d[i] = x * x * d;
            pd[i] = (self.samples[i].conj() * deriv[i]).im;
            p2d[i] = deriv[i].norm_sqr();
        }
        RawGridMoments {
            norm_sq: trapezoid(&dens, h),
            x1: trapezoid(&xd, h),
            x2: trapezoid(&x2d, h),
            p1: trapezoid(&pd, h),
            p2: trapezoid(&p2d, h),
        }
    }
}

/// Normalized Hermite function ψₙ(q) = Hₙ(q) e^{−q²/2} / (π^{1/4} √(2ⁿ n!)),
/// evaluated by the stable normalized three-term recurrence.
pub fn hermite_psi(n: usize, q: f64) -> f64 {
    let mut prev = 0.0_f64;
    let mut cur = std::f64::consts::PI.powf(-0.25) * (-q * q / 2.0).exp();
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * q * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// All of ψ₀(q)..ψ_{n_max−1}(q) in one pass.
pub fn hermite_psi_upto(n_max: usize, q: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max);
    let mut prev = 0.0_f64;
    let mut cur = std::f64::consts::PI.powf(-0.25) * (-q * q / 2.0).exp();
    for k in 0..n_max {
        out.push(cur);
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * q * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    out
}

/// Expand a Fock vector on a position grid: samples(x) = Σₙ cₙ ψₙ(x).
pub fn to_grid(state: &FockVector, spec: GridSpec) -> Result<GridWavefunction> {
    state.check_converged()?;
    let wf = spec.sample(|x| {
        let basis = hermite_psi_upto(state.dim(), x);
        state
            .amplitudes
            .iter()
            .zip(&basis)
            .map(|(c, &b)| c * b)
            .sum()
    });
    wf.check_window()?;
    let n2 = wf.norm_sq();
    if (n2 - state.norm_sq()).abs() > 1e-8 {
        return Err(SimError::Window(format!(
            "grid norm² {n2:.12} drifted from Fock norm² {:.12}",
            state.norm_sq()
        )));
    }
    Ok(wf)
}

/// Project a grid wavefunction onto the first `dim` Fock states:
/// cₙ = ∫ ψₙ(x) samples(x) dx.
pub fn from_grid(wf: &GridWavefunction, dim: usize, tol: f64) -> Result<FockVector> {
    wf.check_window()?;
    from_grid_trusted(wf, dim, tol)
}

/// Like [`from_grid`] but without the window check, for callers that have
/// already bounded the absolute edge weight (the mixture assembler).
pub(crate) fn from_grid_trusted(wf: &GridWavefunction, dim: usize, tol: f64) -> Result<FockVector> {
    let n = wf.n_points();
    let h = wf.dx();
    let mut re_rows = vec![vec![0.0; n]; dim];
    let mut im_rows = vec![vec![0.0; n]; dim];
    for i in 0..n {
        let basis = hermite_psi_upto(dim, wf.spec.x_at(i));
        let s = wf.samples[i];
        for m in 0..dim {
            re_rows[m][i] = basis[m] * s.re;
            im_rows[m][i] = basis[m] * s.im;
        }
    }
    let amplitudes: Vec<C64> = (0..dim)
        .map(|m| C64::new(trapezoid(&re_rows[m], h), trapezoid(&im_rows[m], h)))
        .collect();
    let state = FockVector::new(amplitudes)?;
    let tail = state.tail_mass();
    let norm_sq = state.norm_sq().max(1e-300);
    if tail / norm_sq > tol {
        return Err(SimError::Truncation { tail: tail / norm_sq, tol, dim });
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::QuadRule;

    #[test]
    fn hermite_psi_ground_state_value() {
        // ψ₀(0) = π^{−1/4}.
        let expected = std::f64::consts::PI.powf(-0.25);
        assert!((hermite_psi(0, 0.0) - expected).abs() < 1e-15);
        assert!((expected - 0.751_125_5).abs() < 1e-7);
    }

    #[test]
    fn hermite_psi_odd_parity_at_origin() {
        assert_eq!(hermite_psi(1, 0.0), 0.0);
        assert!(hermite_psi(7, 0.0).abs() < 1e-300);
    }

    #[test]
    fn hermite_psi_orthogonality_by_quadrature() {
        // ∫ψ₃ψ₅ = 0 and ∫ψ₃² = 1, 200-point Gauss–Legendre on [−10, 10].
        let rule = QuadRule::gauss_legendre(200, -10.0, 10.0).unwrap();
        let cross = rule.integrate(|q| hermite_psi(3, q) * hermite_psi(5, q));
        let diag = rule.integrate(|q| hermite_psi(3, q) * hermite_psi(3, q));
        assert!(cross.abs() < 1e-10);
        assert!((diag - 1.0).abs() < 1e-10);
    }

    #[test]
    fn hermite_psi_upto_matches_single() {
        let all = hermite_psi_upto(20, 1.3);
        for (n, v) in all.iter().enumerate() {
            assert!((v - hermite_psi(n, 1.3)).abs() < 1e-14);
        }
    }

    #[test]
    fn vacuum_wavefunction_moments() {
        let spec = GridSpec::default();
        let wf = spec.sample(|x| C64::new(std::f64::consts::PI.powf(-0.25) * (-x * x / 2.0).exp(), 0.0));
        let m = wf.raw_moments();
        assert!((m.norm_sq - 1.0).abs() < 1e-10);
        assert!(m.x1.abs() < 1e-12);
        assert!((m.x2 - 0.5).abs() < 1e-10);
        assert!(m.p1.abs() < 1e-12);
        assert!((m.p2 - 0.5).abs() < 1e-8);
    }

    #[test]
    fn plane_wave_phase_shifts_momentum() {
        // ψ(x)·e^{ikx} shifts ⟨p̂⟩ by exactly k.
        let spec = GridSpec::default();
        let k = 0.7;
        let wf = spec.sample(|x| {
            C64::new(0.0, k * x).exp() * std::f64::consts::PI.powf(-0.25) * (-x * x / 2.0).exp()
        });
        let m = wf.raw_moments();
        assert!((m.p1 - k).abs() < 1e-8);
        assert!((m.p2 - (0.5 + k * k)).abs() < 1e-7);
    }

    #[test]
    fn window_check_flags_leaking_support() {
        let spec = GridSpec::new(-3.0, 3.0, 301).unwrap();
        let wide = spec.sample(|x| C64::new((-x * x / 50.0).exp(), 0.0));
        assert!(wide.check_window().is_err());
    }

    #[test]
    fn vacuum_expansion_matches_closed_form_pointwise() {
        let spec = GridSpec::default();
        let wf = to_grid(&FockVector::vacuum(32), spec).unwrap();
        let mut worst = 0.0f64;
        for (i, s) in wf.samples.iter().enumerate() {
            let x = spec.x_at(i);
            let expect = std::f64::consts::PI.powf(-0.25) * (-x * x / 2.0).exp();
            worst = worst.max((s - C64::new(expect, 0.0)).norm());
        }
        assert!(worst < 1e-12, "max deviation {worst:.3e}");
    }

    #[test]
    fn round_trip_preserves_a_large_coherent_state() {
        // Support here reaches well past the low-energy property-test class.
        let state = crate::fock::coherent(C64::new(1.5, 0.0), 48).unwrap();
        let wf = to_grid(&state, GridSpec::default()).unwrap();
        let back = from_grid(&wf, 48, 1e-8).unwrap();
        let mut worst = 0.0f64;
        for (a, b) in state.amplitudes.iter().zip(&back.amplitudes) {
            worst = worst.max((a - b).norm());
        }
        assert!(worst < 1e-8, "max amplitude deviation {worst:.3e}");
    }

    #[test]
    fn cubic_kernel_projects_onto_levels_0_1_3() {
        // (1 + 0.05x³)e^{−x²/2} expands exactly over |0⟩, |1⟩, |3⟩.
        let chi = 0.05;
        let spec = GridSpec::default();
        let wf = spec.sample(|x| {
            C64::new(
                (1.0 + chi * x * x * x) * std::f64::consts::PI.powf(-0.25) * (-x * x / 2.0).exp(),
                0.0,
            )
        });
        let state = from_grid(&wf, 16, 1e-8).unwrap();
        let n2 = state.norm_sq();
        for (n, a) in state.amplitudes.iter().enumerate() {
            if n == 0 || n == 1 || n == 3 {
                continue;
            }
            assert!(a.norm() / n2.sqrt() < 1e-9, "level {n}: {:.3e}", a.norm());
        }
        // And the expansion coefficients follow the ladder algebra.
        assert!((state.amplitudes[1].re / state.amplitudes[0].re
            - 3.0 * chi / (2.0 * 2f64.sqrt()))
        .abs()
            < 1e-9);
        assert!((state.amplitudes[3].re / state.amplitudes[0].re - 3f64.sqrt() * chi / 2.0).abs() < 1e-9);
    }
}
