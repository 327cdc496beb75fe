//! Numerical simulation of a measurement-induced weak cubic nonlinearity gate
//! on a single optical mode, together with the Gaussian scheme it is
//! benchmarked against.
//!
//! Everything runs in a truncated Fock space and/or on a uniform position
//! grid. The two representations are kept interchangeable and cross-checked.
//!
//! # Conventions (version `conventions-1`)
//!
//! * ħ = 1, `[x̂, p̂] = i`, `â = (x̂ + i p̂)/√2`; the vacuum has
//!   ⟨x̂²⟩ = ⟨p̂²⟩ = 1/2.
//! * Fock position wavefunctions ψₙ(x) = Hₙ(x) e^{−x²/2} / (π^{1/4} √(2ⁿ n!)).
//! * `squeeze_state(g)` is the Gaussian with position wavefunction
//!   e^{−x²/(2g)} / (πg)^{1/4}, i.e. ⟨x̂²⟩ = g/2 and ⟨p̂²⟩ = 1/(2g).
//!   Squeezing is parameterized by this variance ratio g throughout, never by
//!   a squeezing parameter r.
//! * The dilation unitary behind it satisfies Ŝ(g)† x̂ Ŝ(g) = √g·x̂, hence
//!   Ŝ(g)† â Ŝ(g) = μâ + νâ† with μ = cosh(ln√g), ν = sinh(ln√g).
//! * The QND coupling e^{iλx̂₂p̂₁} acts on wavefunctions as the coordinate
//!   shear Ψ(u, x) = ψ_signal(x)·φ_resource(u + λx); homodyning the resource
//!   coordinate at outcome q leaves the signal branch ψ(x)·φ(q + λx).
//! * The feed-forward correction is the x-diagonal phase
//!   e^{−iχ(3q x² + 3q² x)}; the branch-global phase e^{−iχq³} is dropped
//!   (it cannot affect the assembled density matrix).
//! * Default truncation dim = 48, default grid [−10, 10] with 1001 points,
//!   default tail-mass tolerance 1e−8; all overridable.

pub mod benchmark;
pub mod feedforward;
pub mod fock;
pub mod gate;
pub mod grid;
pub mod linalg;
pub mod quadrature;
pub mod resource;
pub mod sweep;

mod par;

use thiserror::Error;

/// Default Fock-space truncation.
pub const DEFAULT_DIM: usize = 48;
/// Default position grid bounds.
pub const DEFAULT_GRID_BOUNDS: (f64, f64) = (-10.0, 10.0);
/// Default number of position grid points.
pub const DEFAULT_GRID_POINTS: usize = 1001;
/// Default tail-mass tolerance for truncated states.
pub const TRUNCATION_TOL: f64 = 1e-8;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid dimension {dim}: {reason}")]
    InvalidDimension { dim: usize, reason: &'static str },

    #[error("domain error for `{field}` = {value}: {reason}")]
    Domain {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("truncation warning: tail mass {tail:.3e} exceeds tolerance {tol:.3e} at dim {dim}")]
    Truncation { tail: f64, tol: f64, dim: usize },

    #[error("grid window error: {0}")]
    Window(String),

    #[error("state annihilated: result norm {norm:.3e} below threshold")]
    Annihilated { norm: f64 },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("homodyne grid mass deficit: captured probability {mass:.8} < {required:.8}")]
    MassDeficit { mass: f64, required: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    #[error("solver failed: {0}")]
    Solver(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("decomposition range error: {0}")]
    DecompositionRange(String),
}

pub type Result<T> = std::result::Result<T, SimError>;
