//! Construction of the cubic resource state, both directly as
//! N·(1 + χx̂³)Ŝ(g)|0⟩ and through the three-photon-subtraction recipe with
//! analytically solved displacements, plus the factorization of the
//! sixth-order weak expansion into two cubic factors.

use num_complex::Complex64 as C64;

use crate::fock::{self, FockVector, XPolynomial};
use crate::grid::{GridSpec, GridWavefunction};
use crate::{Result, SimError};

/// Parameters of the cubic resource: strength χ (real), squeezing g
/// (x-variance g/2), truncation dim.
#[derive(Debug, Clone, Copy)]
pub struct ResourceSpec {
    pub chi: f64,
    pub g: f64,
    pub dim: usize,
}

impl ResourceSpec {
    pub fn new(chi: f64, g: f64, dim: usize) -> Result<Self> {
        if !chi.is_finite() {
            return Err(SimError::Domain { field: "chi", value: chi, reason: "must be finite" });
        }
        if g <= 0.0 || !g.is_finite() {
            return Err(SimError::Domain { field: "g", value: g, reason: "must be positive" });
        }
        if dim < 6 {
            return Err(SimError::InvalidDimension { dim, reason: "resource needs dim ≥ 6" });
        }
        Ok(ResourceSpec { chi, g, dim })
    }
}

/// The cubic resource state together with its pre-normalization norm N_R
/// (needed by the deterministic-gate branch formula) and its closed-form
/// wavefunction.
#[derive(Debug, Clone)]
pub struct ResourceState {
    pub spec: ResourceSpec,
    /// Normalized Fock-basis state.
    pub state: FockVector,
    /// Norm of (1 + χx̂³)Ŝ(g)|0⟩, i.e. N_R.
    pub norm: f64,
}

impl ResourceState {
    /// Normalized position wavefunction, evaluated in closed form.
    pub fn wavefunction(&self, x: f64) -> f64 {
        ResourceWavefunction { chi: self.spec.chi, g: self.spec.g, norm: self.norm }.eval(x)
    }

    /// Closed-form norm of (1 + χx̂³)Ŝ(g)|0⟩: √(1 + 15χ²g³/8).
    pub fn closed_form_norm(chi: f64, g: f64) -> f64 {
        (1.0 + 15.0 * chi * chi * g * g * g / 8.0).sqrt()
    }
}

/// Closed-form evaluator for the normalized resource wavefunction
/// (1 + χx³)·e^{−x²/(2g)} / ((πg)^{1/4}·N_R). Unlike [`ResourceState`] it
/// never materializes a Fock vector, so it works for arbitrarily large g.
#[derive(Debug, Clone, Copy)]
pub struct ResourceWavefunction {
    pub chi: f64,
    pub g: f64,
    pub norm: f64,
}

impl ResourceWavefunction {
    pub fn new(chi: f64, g: f64) -> Result<Self> {
        if !chi.is_finite() {
            return Err(SimError::Domain { field: "chi", value: chi, reason: "must be finite" });
        }
        if g <= 0.0 || !g.is_finite() {
            return Err(SimError::Domain { field: "g", value: g, reason: "must be positive" });
        }
        Ok(ResourceWavefunction { chi, g, norm: ResourceState::closed_form_norm(chi, g) })
    }

    /// Value at x (real for real χ).
    pub fn eval(&self, x: f64) -> f64 {
        let envelope = (-x * x / (2.0 * self.g)).exp() / (std::f64::consts::PI * self.g).powf(0.25);
        (1.0 + self.chi * x * x * x) * envelope / self.norm
    }
}

/// Build the resource directly: N·(1 + χx̂³)Ŝ(g)|0⟩.
pub fn direct_resource(spec: &ResourceSpec) -> Result<ResourceState> {
    let squeezed = fock::squeeze_state(spec.g, spec.dim)?;
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let poly = XPolynomial::new(vec![one, zero, zero, C64::new(spec.chi, 0.0)]);
    let (state, norm) = fock::apply_poly_x(&poly, &squeezed)?;
    state.check_converged()?;
    Ok(ResourceState { spec: *spec, state, norm })
}

/// Grid samples of the closed-form resource wavefunction.
pub fn resource_on_grid(res: &ResourceState, spec: GridSpec) -> GridWavefunction {
    spec.sample(|x| C64::new(res.wavefunction(x), 0.0))
}

/// The constants of the displacement-solving system.
///
/// μ, ν are the hyperbolic coefficients of the generation squeezing,
/// C1 = 2√2·ν³/χ′, C2 = 3ν² + 3μν, and A = αβγ is the normalization
/// constant (equal to C1 once the cubic for ξ is solved).
#[derive(Debug, Clone, Copy)]
pub struct CubicCoefficients {
    pub mu: f64,
    pub nu: f64,
    pub c1: f64,
    pub c2: f64,
    pub a: f64,
    pub chi_prime: f64,
}

/// Build the Cardano-system constants from the cubic strength χ′ (inside the
/// squeezing) and the generation squeeze factor g_gen.
pub fn cubic_coefficients(chi_prime: f64, g_gen: f64) -> Result<CubicCoefficients> {
    if g_gen <= 1.0 || !g_gen.is_finite() {
        return Err(SimError::Domain {
            field: "g_gen",
            value: g_gen,
            reason: "generation squeezing must exceed 1 (ν = 0 collapses the recipe: all displacements vanish and the subtracted state is annihilated)",
        });
    }
    if chi_prime == 0.0 || !chi_prime.is_finite() {
        return Err(SimError::Domain { field: "chi_prime", value: chi_prime, reason: "must be nonzero" });
    }
    let half_log = g_gen.sqrt().ln();
    let mu = half_log.cosh();
    let nu = half_log.sinh();
    let c1 = 2.0 * 2f64.sqrt() * nu.powi(3) / chi_prime;
    let c2 = 3.0 * nu * nu + 3.0 * mu * nu;
    Ok(CubicCoefficients { mu, nu, c1, c2, a: c1, chi_prime })
}

/// Real roots of the depressed cubic t³ + p·t + q = 0.
pub fn depressed_cubic_roots(p: f64, q: f64) -> Vec<f64> {
    let mut roots = Vec::with_capacity(3);
    let disc = q * q / 4.0 + p * p * p / 27.0;
    if disc > 0.0 {
        // One real root; pick the stable cube-root pairing.
        let s = disc.sqrt();
        let u = (-q / 2.0 + s).cbrt();
        let v = (-q / 2.0 - s).cbrt();
        roots.push(u + v);
    } else {
        // Three real roots (p ≤ 0 here): trigonometric form.
        let m = (-p / 3.0).sqrt();
        if m == 0.0 {
            roots.push(0.0);
        } else {
            let arg = (3.0 * q / (2.0 * p * m)).clamp(-1.0, 1.0);
            let theta = arg.acos() / 3.0;
            for k in 0..3 {
                let angle = theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0;
                roots.push(2.0 * m * angle.cos());
            }
        }
    }
    // Newton polish to machine precision.
    for r in roots.iter_mut() {
        for _ in 0..4 {
            let f = *r * *r * *r + p * *r + q;
            let df = 3.0 * *r * *r + p;
            if df.abs() < 1e-300 {
                break;
            }
            *r -= f / df;
        }
    }
    roots
}

/// The displacement amplitudes of the three-photon-subtraction recipe and
/// the intermediate roots they came from.
#[derive(Debug, Clone, Copy)]
pub struct DisplacementTriple {
    pub alpha: C64,
    pub beta: C64,
    pub gamma: C64,
    pub xi: f64,
    pub zeta: f64,
}

impl DisplacementTriple {
    pub fn displacements(&self) -> [C64; 3] {
        [self.alpha, self.beta, self.gamma]
    }
}

/// Solve the displacement system: ξ is a real root of ξ³ + C2·ξ + C1 = 0,
/// ζ = ξ² + C2, α,β = (ξ ± √(ξ²−4ζ))/2, γ = −(α+β).
///
/// When several real roots exist the one with smallest |ξ| is taken
/// (smallest displacements, highest heralding probability), ties broken
/// toward sign(C1).
pub fn solve_triple(c: &CubicCoefficients) -> DisplacementTriple {
    let roots = depressed_cubic_roots(c.c2, c.c1);
    let xi = roots
        .iter()
        .copied()
        .min_by(|a, b| {
            let (ka, kb) = (a.abs(), b.abs());
            if (ka - kb).abs() < 1e-12 * ka.max(kb).max(1.0) {
                let pa = (a.signum() == c.c1.signum()) as u8;
                let pb = (b.signum() == c.c1.signum()) as u8;
                pb.cmp(&pa)
            } else {
                ka.partial_cmp(&kb).unwrap()
            }
        })
        .expect("a depressed cubic always has a real root");
    let zeta = xi * xi + c.c2;
    let disc = xi * xi - 4.0 * zeta;
    let (alpha, beta) = if disc >= 0.0 {
        let s = disc.sqrt();
        (C64::new((xi + s) / 2.0, 0.0), C64::new((xi - s) / 2.0, 0.0))
    } else {
        let s = (-disc).sqrt();
        (C64::new(xi / 2.0, s / 2.0), C64::new(xi / 2.0, -s / 2.0))
    };
    let gamma = -(alpha + beta);
    DisplacementTriple { alpha, beta, gamma, xi, zeta }
}

/// Residuals of the four displacement relations
/// (A = αβγ, α+β+γ = 0, 2√2ν³ = Aχ′, 3ν²+3μν = αβ+αγ+βγ).
pub fn triple_residuals(c: &CubicCoefficients, t: &DisplacementTriple) -> [f64; 4] {
    let prod = t.alpha * t.beta * t.gamma;
    let sum = t.alpha + t.beta + t.gamma;
    let e2 = t.alpha * t.beta + t.alpha * t.gamma + t.beta * t.gamma;
    [
        (prod - C64::new(c.a, 0.0)).norm(),
        sum.norm(),
        (2.0 * 2f64.sqrt() * c.nu.powi(3) - c.a * c.chi_prime).abs(),
        (e2 - C64::new(3.0 * c.nu * c.nu + 3.0 * c.mu * c.nu, 0.0)).norm(),
    ]
}

/// χ′ to feed the Cardano system so the recipe reproduces the resource of
/// cubic strength `chi` living on the recipe's own generation carrier:
/// χ′ = χ·g_gen^{−3/2}.
pub fn recipe_chi_prime(chi: f64, g_gen: f64) -> f64 {
    chi * g_gen.powf(-1.5)
}

/// Variance parameter of the generation carrier: squeezing by a factor
/// g_gen in x means ⟨x̂²⟩ = 1/(2·g_gen).
pub fn carrier_g(g_gen: f64) -> f64 {
    1.0 / g_gen
}

/// Run the recipe: three displaced photon subtractions
/// (â−α)(â−β)(â−γ) on the generation-squeezed carrier. Returns the
/// normalized state and the pre-normalization norm² (success-probability
/// proxy).
pub fn recipe_state(t: &DisplacementTriple, g_gen: f64, dim: usize) -> Result<(FockVector, f64)> {
    if g_gen < 1.0 || !g_gen.is_finite() {
        return Err(SimError::Domain { field: "g_gen", value: g_gen, reason: "generation squeezing must be ≥ 1" });
    }
    let carrier = fock::squeeze_state(carrier_g(g_gen), dim)?;
    let mut v = carrier.amplitudes;
    // Apply (â − d) right-to-left; the factors commute.
    for d in [t.gamma, t.beta, t.alpha] {
        let mut next = vec![C64::new(0.0, 0.0); dim];
        for (n, slot) in next.iter_mut().enumerate() {
            let lowered = if n + 1 < dim {
                v[n + 1] * ((n + 1) as f64).sqrt()
            } else {
                C64::new(0.0, 0.0)
            };
            *slot = lowered - d * v[n];
        }
        v = next;
    }
    let raw = FockVector::new(v)?;
    let norm_sq = raw.norm_sq();
    let (state, _) = raw.normalized()?;
    Ok((state, norm_sq))
}

/// The two cubic factors composing the sixth-order weak expansion:
/// (1 + β₁x³)(1 + β₂x³) = 1 + iχx³ − (χ²/2)x⁶.
#[derive(Debug, Clone, Copy)]
pub struct ComposeBetas {
    pub beta1: C64,
    pub beta2: C64,
}

/// β₁, β₂ are the roots of t² − iχt − χ²/2 = 0: χ(±1 + i)/2.
pub fn compose_betas(chi: f64) -> Result<ComposeBetas> {
    if chi <= 0.0 || !chi.is_finite() {
        return Err(SimError::Domain { field: "chi", value: chi, reason: "must be positive" });
    }
    Ok(ComposeBetas {
        beta1: C64::new(chi / 2.0, chi / 2.0),
        beta2: C64::new(-chi / 2.0, chi / 2.0),
    })
}
