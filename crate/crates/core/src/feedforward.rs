//! Feed-forward machinery: the outcome-dependent correction unitary
//! e^{−iχ(3qx̂² + 3q²x̂)} and the decomposition of its nontrivial x²-phase
//! part into phase shift · squeezer · phase shift.

use crate::fock::{self, OperatorMatrix};
use crate::{Result, SimError};

/// The correction unitary Û_FF = e^{−iχ(3q·x̂² + 3q²·x̂)}. Diagonal in
/// position representation: multiplication by e^{−iχ(3qx² + 3q²x)}.
pub fn feedforward_unitary(q: f64, chi: f64, dim: usize) -> Result<OperatorMatrix> {
    let (x, _) = fock::quadratures(dim)?;
    let x2 = x.dot(&x);
    let scale_q = num_complex::Complex64::new(-3.0 * chi * q, 0.0);
    let scale_q2 = num_complex::Complex64::new(-3.0 * chi * q * q, 0.0);
    let gen = &x2.matrix * scale_q + &x.matrix * scale_q2;
    fock::unitary_from_hermitian(&OperatorMatrix { matrix: gen })
}

/// The x²-phase e^{iλ_c x̂²}.
pub fn shear_unitary(lambda_c: f64, dim: usize) -> Result<OperatorMatrix> {
    let (x, _) = fock::quadratures(dim)?;
    let x2 = x.dot(&x);
    let gen = &x2.matrix * num_complex::Complex64::new(lambda_c, 0.0);
    fock::unitary_from_hermitian(&OperatorMatrix { matrix: gen })
}

/// Decomposition of e^{iλ_c x̂²} into phase shift φ₁, squeezing gain g_f,
/// phase shift φ₂, satisfying tan φ₁ tan φ₂ = −1, tan φ₁ = g_f, and
/// (1 − g_f⁴)cos φ₁ sin φ₂ = 2 g_f λ_c.
#[derive(Debug, Clone, Copy)]
pub struct FFDecomposition {
    pub phi1: f64,
    pub phi2: f64,
    pub g_f: f64,
}

impl FFDecomposition {
    /// Residuals of the three defining constraints for coefficient λ_c.
    pub fn constraint_residuals(&self, lambda_c: f64) -> [f64; 3] {
        [
            (self.phi1.tan() * self.phi2.tan() + 1.0).abs(),
            (self.phi1.tan() - self.g_f).abs(),
            ((1.0 - self.g_f.powi(4)) * self.phi1.cos() * self.phi2.sin() - 2.0 * self.g_f * lambda_c)
                .abs(),
        ]
    }

    /// The composed operator phase_shift(φ₂)·squeezer(g_f)·phase_shift(φ₁).
    /// The squeezer with gain g_f scales x̂ → x̂/g_f, i.e. a dilation by
    /// 1/g_f².
    pub fn compose(&self, dim: usize) -> Result<OperatorMatrix> {
        let p1 = fock::phase_shift(self.phi1, dim)?;
        let p2 = fock::phase_shift(self.phi2, dim)?;
        let s = fock::dilation_unitary(1.0 / (self.g_f * self.g_f), dim)?;
        Ok(p2.dot(&s).dot(&p1))
    }
}

/// Solve the three feed-forward constraints for the given shear coefficient
/// by one-dimensional root finding in g_f, with φ₁ = arctan(g_f) and
/// φ₂ = arctan(−1/g_f).
pub fn ff_decompose(lambda_c: f64) -> Result<FFDecomposition> {
    if !lambda_c.is_finite() {
        return Err(SimError::Domain { field: "lambda_c", value: lambda_c, reason: "must be finite" });
    }
    let residual = |g: f64| -> f64 {
        let phi1 = g.atan();
        let phi2 = (-1.0 / g).atan();
        (1.0 - g.powi(4)) * phi1.cos() * phi2.sin() - 2.0 * g * lambda_c
    };
    // Bracket the root: residual(0⁺) = −1, residual(g) → +∞ for large g.
    let mut lo = 1e-9;
    let mut hi = 2.0 * lambda_c.abs() + 3.0;
    if residual(lo) > 0.0 || residual(hi) < 0.0 {
        return Err(SimError::DecompositionRange(format!(
            "no sign change in ({lo:.1e}, {hi:.2}) for lambda_c = {lambda_c}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if residual(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * hi.max(1.0) {
            break;
        }
    }
    let g_f = 0.5 * (lo + hi);
    let d = FFDecomposition { phi1: g_f.atan(), phi2: (-1.0 / g_f).atan(), g_f };
    let res = d.constraint_residuals(lambda_c);
    if res.iter().any(|r| *r > 1e-9) {
        return Err(SimError::Solver(format!(
            "feed-forward constraints not met: residuals {res:?}"
        )));
    }
    Ok(d)
}

/// Largest deviation between two operators on the low block
/// `[0, block)²`, after aligning the global phase on the block's largest
/// entry. Exponentials of truncated generators are trustworthy only on a
/// block comfortably below the truncation edge, so identity checks build
/// the operators with padding and compare the declared block.
pub fn residual_up_to_global_phase(a: &OperatorMatrix, b: &OperatorMatrix, block: usize) -> f64 {
    let block = block.min(a.dim()).min(b.dim());
    let mut pivot = (0usize, 0usize);
    let mut best = 0.0f64;
    for i in 0..block {
        for j in 0..block {
            let m = a.matrix[[i, j]].norm();
            if m > best {
                best = m;
                pivot = (i, j);
            }
        }
    }
    let pa = a.matrix[[pivot.0, pivot.1]];
    let pb = b.matrix[[pivot.0, pivot.1]];
    if pb.norm() < 1e-300 {
        return f64::INFINITY;
    }
    let phase = pa / pb / (pa / pb).norm();
    let mut worst = 0.0f64;
    for i in 0..block {
        for j in 0..block {
            worst = worst.max((a.matrix[[i, j]] - phase * b.matrix[[i, j]]).norm());
        }
    }
    worst
}
