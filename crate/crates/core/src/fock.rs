//! Truncated Fock-space states and operators for a single bosonic mode.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::linalg::{self, adjoint};
use crate::{Result, SimError, TRUNCATION_TOL};

/// Photon-number amplitude vector c₀..c_{dim−1}.
#[derive(Debug, Clone)]
pub struct FockVector {
    pub amplitudes: Vec<C64>,
}

impl FockVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(SimError::InvalidDimension { dim: 0, reason: "state needs at least one amplitude" });
        }
        Ok(FockVector { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn vacuum(dim: usize) -> Self {
        Self::basis_state(0, dim)
    }

    /// |n⟩ at truncation `dim`. Panics if n ≥ dim (programming error).
    pub fn basis_state(n: usize, dim: usize) -> Self {
        assert!(n < dim, "basis index {n} outside truncation {dim}");
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[n] = C64::new(1.0, 0.0);
        FockVector { amplitudes }
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Mass in the top five truncation levels, Σ_{n ≥ dim−5} |cₙ|².
    pub fn tail_mass(&self) -> f64 {
        let dim = self.dim();
        let start = dim.saturating_sub(5);
        self.amplitudes[start..].iter().map(|c| c.norm_sqr()).sum()
    }

    /// Largest n whose relative weight |cₙ|²/‖c‖² exceeds `threshold`.
    pub fn effective_support(&self, threshold: f64) -> usize {
        let n2 = self.norm_sq().max(1e-300);
        self.amplitudes
            .iter()
            .enumerate()
            .rev()
            .find(|(_, c)| c.norm_sqr() / n2 > threshold)
            .map(|(n, _)| n)
            .unwrap_or(0)
    }

    /// Converged means the relative tail mass is below the truncation
    /// tolerance.
    pub fn check_converged(&self) -> Result<()> {
        let rel = self.tail_mass() / self.norm_sq().max(1e-300);
        if rel >= TRUNCATION_TOL {
            return Err(SimError::Truncation { tail: rel, tol: TRUNCATION_TOL, dim: self.dim() });
        }
        Ok(())
    }

    pub fn check_normalized(&self) -> Result<()> {
        let n2 = self.norm_sq();
        if (n2 - 1.0).abs() >= 1e-12 {
            return Err(SimError::Contract(format!(
                "state is not normalized: norm² = {n2:.15}"
            )));
        }
        Ok(())
    }

    /// Unit-norm copy plus the original norm.
    pub fn normalized(&self) -> Result<(FockVector, f64)> {
        let norm = self.norm_sq().sqrt();
        if norm < 1e-140 {
            return Err(SimError::Annihilated { norm });
        }
        let amplitudes = self.amplitudes.iter().map(|c| c / norm).collect();
        Ok((FockVector { amplitudes }, norm))
    }

    pub fn inner(&self, other: &FockVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(SimError::DimMismatch { left: self.dim(), right: other.dim() });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

/// Dense operator on the truncated Fock space.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub matrix: Array2<C64>,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, state: &FockVector) -> Result<FockVector> {
        if self.dim() != state.dim() {
            return Err(SimError::DimMismatch { left: self.dim(), right: state.dim() });
        }
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..self.dim() {
                acc += self.matrix[[i, j]] * state.amplitudes[j];
            }
            *o = acc;
        }
        Ok(FockVector { amplitudes: out })
    }

    pub fn dot(&self, other: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix { matrix: self.matrix.dot(&other.matrix) }
    }

    pub fn dagger(&self) -> OperatorMatrix {
        OperatorMatrix { matrix: adjoint(&self.matrix) }
    }

    pub fn hermiticity_residual(&self) -> f64 {
        linalg::hermiticity_residual(&self.matrix)
    }

    /// ⟨state|Op|state⟩.
    pub fn expectation(&self, state: &FockVector) -> Result<C64> {
        let applied = self.apply(state)?;
        state.inner(&applied)
    }
}

/// Annihilation operator: entry (n−1, n) = √n.
pub fn destroy(dim: usize) -> Result<OperatorMatrix> {
    if dim < 2 {
        return Err(SimError::InvalidDimension { dim, reason: "ladder operators need dim ≥ 2" });
    }
    let mut m = Array2::zeros((dim, dim));
    for n in 1..dim {
        m[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    Ok(OperatorMatrix { matrix: m })
}

pub fn create(dim: usize) -> Result<OperatorMatrix> {
    Ok(destroy(dim)?.dagger())
}

pub fn number(dim: usize) -> Result<OperatorMatrix> {
    if dim < 2 {
        return Err(SimError::InvalidDimension { dim, reason: "ladder operators need dim ≥ 2" });
    }
    let mut m = Array2::zeros((dim, dim));
    for n in 0..dim {
        m[[n, n]] = C64::new(n as f64, 0.0);
    }
    Ok(OperatorMatrix { matrix: m })
}

/// Quadrature pair (x̂, p̂) with x̂ = (â+â†)/√2, p̂ = (â−â†)/(i√2).
pub fn quadratures(dim: usize) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let a = destroy(dim)?;
    let ad = a.dagger();
    let inv_sqrt2 = 1.0 / 2f64.sqrt();
    let x = OperatorMatrix { matrix: (&a.matrix + &ad.matrix) * C64::new(inv_sqrt2, 0.0) };
    let p = OperatorMatrix { matrix: (&a.matrix - &ad.matrix) * C64::new(0.0, -inv_sqrt2) };
    Ok((x, p))
}

/// Coherent state |α⟩ with cₙ = e^{−|α|²/2} αⁿ/√(n!), renormalized on the
/// truncated space after the tail-mass check.
pub fn coherent(alpha: C64, dim: usize) -> Result<FockVector> {
    if dim < 2 {
        return Err(SimError::InvalidDimension { dim, reason: "coherent state needs dim ≥ 2" });
    }
    let mut amplitudes = Vec::with_capacity(dim);
    let mut c = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..dim {
        amplitudes.push(c);
        c = c * alpha / C64::new(((n + 1) as f64).sqrt(), 0.0);
    }
    let state = FockVector { amplitudes };
    let deficit = (1.0 - state.norm_sq()).max(0.0);
    let tail = state.tail_mass() + deficit;
    if tail >= TRUNCATION_TOL {
        return Err(SimError::Truncation { tail, tol: TRUNCATION_TOL, dim });
    }
    let (normalized, _) = state.normalized()?;
    Ok(normalized)
}

/// Squeezed vacuum with position wavefunction e^{−x²/(2g)}/(πg)^{1/4}:
/// ⟨x̂²⟩ = g/2, ⟨p̂²⟩ = 1/(2g), even photon numbers only.
pub fn squeeze_state(g: f64, dim: usize) -> Result<FockVector> {
    if g <= 0.0 || !g.is_finite() {
        return Err(SimError::Domain { field: "g", value: g, reason: "squeezing parameter must be positive" });
    }
    if dim < 2 {
        return Err(SimError::InvalidDimension { dim, reason: "squeezed state needs dim ≥ 2" });
    }
    // (μâ − νâ†) annihilates the state, giving the even-level recurrence
    // c_{2k+2}/c_{2k} = t·√((2k+1)/(2k+2)) with t = ν/μ = (g−1)/(g+1).
    let t = (g - 1.0) / (g + 1.0);
    let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
    let mut c = 1.0f64;
    let mut k = 0usize;
    while 2 * k < dim {
        amplitudes[2 * k] = C64::new(c, 0.0);
        let n = (2 * k) as f64;
        c *= t * ((n + 1.0) / (n + 2.0)).sqrt();
        k += 1;
    }
    let state = FockVector { amplitudes };
    // Closed-form total norm²: Σ t^{2k} (2k)!/(4^k k!²) = 1/√(1−t²).
    let total = 1.0 / (1.0 - t * t).sqrt();
    let tail = (total - state.norm_sq()).max(0.0) + state.tail_mass();
    if tail / total >= TRUNCATION_TOL {
        return Err(SimError::Truncation { tail: tail / total, tol: TRUNCATION_TOL, dim });
    }
    let (normalized, _) = state.normalized()?;
    Ok(normalized)
}

/// e^{iH} for a Hermitian operator, via eigendecomposition.
pub fn unitary_from_hermitian(h: &OperatorMatrix) -> Result<OperatorMatrix> {
    let res = h.hermiticity_residual();
    if res > 1e-12 {
        return Err(SimError::Contract(format!(
            "unitary_from_hermitian requires a Hermitian generator; residual {res:.3e}"
        )));
    }
    Ok(OperatorMatrix { matrix: linalg::expi_hermitian(&h.matrix, 1e-12)? })
}

/// Phase-space rotation e^{iφ n̂} (diagonal, exact).
pub fn phase_shift(phi: f64, dim: usize) -> Result<OperatorMatrix> {
    if dim < 2 {
        return Err(SimError::InvalidDimension { dim, reason: "phase shift needs dim ≥ 2" });
    }
    let mut m = Array2::zeros((dim, dim));
    for n in 0..dim {
        m[[n, n]] = C64::new(0.0, phi * n as f64).exp();
    }
    Ok(OperatorMatrix { matrix: m })
}

/// Dilation unitary Ŝ(m) with Ŝ†x̂Ŝ = √m·x̂, generated by
/// −ln(√m)·(x̂p̂ + p̂x̂)/2.
pub fn dilation_unitary(m: f64, dim: usize) -> Result<OperatorMatrix> {
    if m <= 0.0 || !m.is_finite() {
        return Err(SimError::Domain { field: "m", value: m, reason: "dilation factor must be positive" });
    }
    let (x, p) = quadratures(dim)?;
    let xp = x.matrix.dot(&p.matrix);
    let px = p.matrix.dot(&x.matrix);
    let gen = (&xp + &px) * C64::new(-0.5 * m.sqrt().ln(), 0.0);
    unitary_from_hermitian(&OperatorMatrix { matrix: gen })
}

/// Operator polynomial Σ c_k x̂^k.
#[derive(Debug, Clone)]
pub struct XPolynomial {
    pub coefficients: Vec<C64>,
}

impl XPolynomial {
    pub fn new(coefficients: Vec<C64>) -> Self {
        XPolynomial { coefficients }
    }

    pub fn degree(&self) -> usize {
        self.coefficients
            .iter()
            .enumerate()
            .rev()
            .find(|(_, c)| c.norm() > 0.0)
            .map(|(k, _)| k)
            .unwrap_or(0)
    }

    /// Pointwise evaluation Σ c_k x^k.
    pub fn eval(&self, x: f64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for c in self.coefficients.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Dense matrix Σ c_k X^k at truncation `dim`.
    pub fn to_matrix(&self, dim: usize) -> Result<OperatorMatrix> {
        let (x, _) = quadratures(dim)?;
        let mut acc = Array2::zeros((dim, dim));
        let mut power = linalg::identity(dim);
        for (k, c) in self.coefficients.iter().enumerate() {
            if k > 0 {
                power = power.dot(&x.matrix);
            }
            acc = acc + &power * *c;
        }
        Ok(OperatorMatrix { matrix: acc })
    }
}

/// Apply Σ c_k x̂^k to a state. Returns the normalized result together with
/// the pre-normalization norm (the success amplitude of the filter).
pub fn apply_poly_x(poly: &XPolynomial, state: &FockVector) -> Result<(FockVector, f64)> {
    let dim = state.dim();
    let degree = poly.degree();
    let support = state.effective_support(TRUNCATION_TOL);
    if degree + support >= dim {
        return Err(SimError::Contract(format!(
            "polynomial degree {degree} + state support {support} exceeds truncation {dim}"
        )));
    }
    let (x, _) = quadratures(dim)?;
    let mut power = state.clone();
    let mut acc = vec![C64::new(0.0, 0.0); dim];
    for (k, c) in poly.coefficients.iter().enumerate() {
        if k > 0 {
            power = x.apply(&power)?;
        }
        for (a, p) in acc.iter_mut().zip(&power.amplitudes) {
            *a += c * p;
        }
    }
    let raw = FockVector { amplitudes: acc };
    let (normalized, norm) = raw.normalized()?;
    Ok((normalized, norm))
}

/// |⟨a|b⟩|² for normalized states of equal truncation.
pub fn fidelity(a: &FockVector, b: &FockVector) -> Result<f64> {
    a.check_normalized()?;
    b.check_normalized()?;
    let f = a.inner(b)?.norm_sqr();
    if f > 1.0 + 1e-12 {
        return Err(SimError::Contract(format!("fidelity {f} above 1")));
    }
    Ok(f)
}

/// Fock-basis mixed state.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub entries: Array2<C64>,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn from_pure(state: &FockVector) -> Result<DensityMatrix> {
        state.check_normalized()?;
        let dim = state.dim();
        let mut entries = Array2::zeros((dim, dim));
        for i in 0..dim {
            for j in 0..dim {
                entries[[i, j]] = state.amplitudes[i] * state.amplitudes[j].conj();
            }
        }
        Ok(DensityMatrix { entries })
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.entries[[i, i]]).sum()
    }

    /// Tr ρ², using Hermiticity.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// ⟨ψ|ρ|ψ⟩ — fidelity against a pure state.
    pub fn fidelity_with_pure(&self, state: &FockVector) -> Result<f64> {
        state.check_normalized()?;
        if state.dim() != self.dim() {
            return Err(SimError::DimMismatch { left: state.dim(), right: self.dim() });
        }
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                acc += state.amplitudes[i].conj() * self.entries[[i, j]] * state.amplitudes[j];
            }
        }
        Ok(acc.re)
    }

    /// Hermiticity, unit trace, and positive semi-definiteness checks.
    pub fn validate(&self) -> Result<()> {
        let herm = linalg::hermiticity_residual(&self.entries);
        if herm > 1e-10 {
            return Err(SimError::Contract(format!("density matrix not Hermitian: {herm:.3e}")));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-10 {
            return Err(SimError::Contract(format!("density matrix trace {tr} is not 1")));
        }
        let eig = linalg::eigh(&self.entries, 1e-9)?;
        let min = eig.values.first().copied().unwrap_or(0.0);
        if min < -1e-8 {
            return Err(SimError::Contract(format!("density matrix has eigenvalue {min:.3e} < −1e−8")));
        }
        Ok(())
    }

    pub fn expectation(&self, op: &OperatorMatrix) -> Result<f64> {
        if op.dim() != self.dim() {
            return Err(SimError::DimMismatch { left: op.dim(), right: self.dim() });
        }
        let prod = self.entries.dot(&op.matrix);
        let tr: C64 = (0..self.dim()).map(|i| prod[[i, i]]).sum();
        Ok(tr.re)
    }
}

/// First and second quadrature moments plus purity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentReport {
    pub mean_x: f64,
    pub mean_p: f64,
    pub mean_x2: f64,
    pub mean_p2: f64,
    pub purity: f64,
}

impl MomentReport {
    pub fn var_x(&self) -> f64 {
        self.mean_x2 - self.mean_x * self.mean_x
    }

    pub fn var_p(&self) -> f64 {
        self.mean_p2 - self.mean_p * self.mean_p
    }

    /// Variance positivity, the uncertainty relation, and purity bounds.
    pub fn validate(&self) -> Result<()> {
        if self.var_x() < -1e-9 || self.var_p() < -1e-9 {
            return Err(SimError::Contract("negative quadrature variance".into()));
        }
        if self.var_x() * self.var_p() < 0.25 - 1e-6 {
            return Err(SimError::Contract(format!(
                "uncertainty product {:.8} below 1/4",
                self.var_x() * self.var_p()
            )));
        }
        if self.purity <= 0.0 || self.purity > 1.0 + 1e-9 {
            return Err(SimError::Contract(format!("purity {} outside (0, 1]", self.purity)));
        }
        Ok(())
    }
}

/// Moments of a normalized pure state.
pub fn moments_pure(state: &FockVector) -> Result<MomentReport> {
    state.check_normalized()?;
    let dim = state.dim();
    let (x, p) = quadratures(dim)?;
    let x2 = x.dot(&x);
    let p2 = p.dot(&p);
    let report = MomentReport {
        mean_x: x.expectation(state)?.re,
        mean_p: p.expectation(state)?.re,
        mean_x2: x2.expectation(state)?.re,
        mean_p2: p2.expectation(state)?.re,
        purity: 1.0,
    };
    Ok(report)
}

/// Moments of a density matrix (purity = Tr ρ²).
pub fn moments_density(rho: &DensityMatrix) -> Result<MomentReport> {
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-8 {
        return Err(SimError::Contract(format!("density matrix trace {tr} is not 1")));
    }
    let dim = rho.dim();
    let (x, p) = quadratures(dim)?;
    let x2 = x.dot(&x);
    let p2 = p.dot(&p);
    Ok(MomentReport {
        mean_x: rho.expectation(&x)?,
        mean_p: rho.expectation(&p)?,
        mean_x2: rho.expectation(&x2)?,
        mean_p2: rho.expectation(&p2)?,
        purity: rho.purity(),
    })
}
