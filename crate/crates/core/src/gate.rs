//! The measurement-induced cubic gate chain: QND coupling of signal and
//! resource, homodyne conditioning on the outcome q, feed-forward
//! correction, and assembly of the deterministic (mixed) or probabilistic
//! (pure) output.
//!
//! The whole chain runs in position representation — the QND coupling is a
//! coordinate shear and the feed-forward is x-diagonal — so no two-mode
//! matrix exponential is ever formed. Fock conversion happens once, at
//! output.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::fock::{self, DensityMatrix, FockVector, MomentReport};
use crate::grid::{from_grid, from_grid_trusted, to_grid, GridSpec, GridWavefunction, RawGridMoments};
use crate::par;
use crate::quadrature::QuadRule;
use crate::resource::ResourceWavefunction;
use crate::{Result, SimError};

/// Homodyne-outcome integration grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QGrid {
    pub min: f64,
    pub max: f64,
    pub nodes: usize,
}

impl Default for QGrid {
    fn default() -> Self {
        QGrid { min: -8.0, max: 8.0, nodes: 161 }
    }
}

impl QGrid {
    pub fn rule(&self) -> Result<QuadRule> {
        QuadRule::gauss_legendre(self.nodes, self.min, self.max)
    }
}

/// Full configuration of the deterministic gate.
#[derive(Debug, Clone, Copy)]
pub struct GateConfig {
    /// Cubic strength of the resource.
    pub chi: f64,
    /// Resource squeezing (x-variance g/2).
    pub g: f64,
    /// QND gain.
    pub lambda: f64,
    pub q_grid: QGrid,
    /// Truncation of the output density matrix.
    pub signal_dim: usize,
    /// Position grid for the branch wavefunctions.
    pub grid: GridSpec,
}

impl Default for GateConfig {
    fn default() -> Self {
        GateConfig {
            chi: 0.03,
            g: 1.0,
            lambda: 1.0,
            q_grid: QGrid::default(),
            signal_dim: crate::DEFAULT_DIM,
            grid: GridSpec::default(),
        }
    }
}

impl GateConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lambda == 0.0 || !self.lambda.is_finite() {
            return Err(SimError::Domain { field: "lambda", value: self.lambda, reason: "QND gain must be nonzero" });
        }
        if self.g <= 0.0 || !self.g.is_finite() {
            return Err(SimError::Domain { field: "g", value: self.g, reason: "must be positive" });
        }
        if !self.chi.is_finite() {
            return Err(SimError::Domain { field: "chi", value: self.chi, reason: "must be finite" });
        }
        if self.q_grid.min > -8.0 || self.q_grid.max < 8.0 {
            return Err(SimError::Domain {
                field: "q_grid",
                value: self.q_grid.max,
                reason: "homodyne grid must cover [-8, 8]",
            });
        }
        if self.q_grid.nodes < 81 {
            return Err(SimError::InvalidDimension { dim: self.q_grid.nodes, reason: "homodyne grid needs at least 81 nodes" });
        }
        if self.signal_dim < 4 {
            return Err(SimError::InvalidDimension { dim: self.signal_dim, reason: "output truncation too small" });
        }
        Ok(())
    }

    pub fn resource(&self) -> Result<ResourceWavefunction> {
        ResourceWavefunction::new(self.chi, self.g)
    }
}

/// One homodyne outcome: the value q, the density P(q), and the quadrature
/// weight attached to it.
#[derive(Debug, Clone, Copy)]
pub struct HomodyneRecord {
    pub q: f64,
    pub density: f64,
    pub weight: f64,
}

/// Gate output: mixed for the deterministic mode, pure for the
/// probabilistic one.
#[derive(Debug, Clone)]
pub enum GateState {
    Deterministic(DensityMatrix),
    Probabilistic(FockVector),
}

#[derive(Debug, Clone)]
pub struct GateOutput {
    pub state: GateState,
    pub records: Vec<HomodyneRecord>,
    pub report: MomentReport,
}

/// The unnormalized conditional branch for homodyne outcome q:
/// ψ_in(x)·φ_R(q + λx)·e^{−iχ(3qx² + 3q²x)}, together with its density
/// P(q) = ‖branch‖². The branch-global phase e^{−iχq³} is dropped.
pub fn branch_wavefunction(
    input: &GridWavefunction,
    resource: &ResourceWavefunction,
    lambda: f64,
    q: f64,
) -> (GridWavefunction, f64) {
    let chi = resource.chi;
    let spec = input.spec;
    let samples = input
        .samples
        .iter()
        .enumerate()
        .map(|(j, psi)| {
            let x = spec.x_at(j);
            let phi = resource.eval(q + lambda * x);
            let phase = C64::new(0.0, -chi * (3.0 * q * x * x + 3.0 * q * q * x)).exp();
            psi * phi * phase
        })
        .collect();
    let branch = GridWavefunction { spec, samples };
    let density = branch.norm_sq();
    (branch, density)
}

pub(crate) struct MixtureParts {
    pub records: Vec<HomodyneRecord>,
    /// Σ w·P(q) over the homodyne grid.
    pub captured: f64,
    /// Σ w·|branch⟩⟨branch| in the Fock basis, unnormalized.
    pub rho_raw: Option<Array2<C64>>,
    /// Fock-side trace of `rho_raw`.
    pub raw_trace: f64,
    /// Σ w · (branch grid moments), unnormalized.
    pub grid_moments: RawGridMoments,
}

/// Evaluate every branch over the homodyne rule and accumulate the mixture.
/// Branch evaluations run in parallel; the reduction is an ordered
/// sequential sum.
pub(crate) fn assemble_mixture<F>(
    rule: &QuadRule,
    branch_fn: F,
    dim: usize,
    with_density: bool,
) -> Result<MixtureParts>
where
    F: Fn(f64) -> GridWavefunction + Sync + Send,
{
    // Branches with effectively zero probability are recorded but skipped
    // for Fock conversion.
    const NEGLIGIBLE: f64 = 1e-22;

    let nodes: Vec<(f64, f64)> = rule.nodes.iter().copied().zip(rule.weights.iter().copied()).collect();
    let per_node: Vec<Result<(HomodyneRecord, RawGridMoments, Option<FockVector>)>> =
        par::map_collect(&nodes, |&(q, w)| {
            let branch = branch_fn(q);
            let moments = branch.raw_moments();
            let density = moments.norm_sq;
            let record = HomodyneRecord { q, density, weight: w };
            if density < NEGLIGIBLE {
                return Ok((record, RawGridMoments::default(), None));
            }
            // Guard the absolute edge density: a deep-tail branch may have
            // a large relative edge ratio while carrying no actual weight.
            let ratio = branch.edge_ratio();
            if ratio >= 1e-6 && density * ratio * ratio >= 1e-12 {
                return Err(SimError::Window(format!(
                    "branch at q = {q:.3} reaches the grid edge (edge/peak = {ratio:.3e}, density {density:.3e})"
                )));
            }
            let fock = if with_density {
                // Per-branch tails are not gated here: the mixture-level
                // trace-vs-captured check is the integrity guard, and it
                // sees exactly the summed truncation loss.
                Some(from_grid_trusted(&branch, dim, f64::INFINITY)?)
            } else {
                None
            };
            Ok((record, moments, fock))
        });

    let mut records = Vec::with_capacity(nodes.len());
    let mut captured = 0.0;
    let mut raw_trace = 0.0;
    let mut grid_moments = RawGridMoments::default();
    let mut rho_raw = with_density.then(|| Array2::<C64>::zeros((dim, dim)));

    for item in per_node {
        let (record, moments, fock) = item?;
        let w = record.weight;
        captured += w * record.density;
        grid_moments.norm_sq += w * moments.norm_sq;
        grid_moments.x1 += w * moments.x1;
        grid_moments.x2 += w * moments.x2;
        grid_moments.p1 += w * moments.p1;
        grid_moments.p2 += w * moments.p2;
        if let (Some(rho), Some(c)) = (rho_raw.as_mut(), fock) {
            raw_trace += w * c.norm_sq();
            for i in 0..dim {
                let ci = c.amplitudes[i];
                if ci.norm_sqr() < 1e-300 {
                    continue;
                }
                for j in 0..dim {
                    rho[[i, j]] += C64::new(w, 0.0) * ci * c.amplitudes[j].conj();
                }
            }
        }
        records.push(record);
    }

    Ok(MixtureParts { records, captured, rho_raw, raw_trace, grid_moments })
}

/// Deterministic gate: integrate the feed-forward-corrected branches over
/// the homodyne outcome into a mixed output state.
pub fn run_deterministic(input: &FockVector, cfg: &GateConfig) -> Result<GateOutput> {
    cfg.validate()?;
    input.check_converged()?;
    input.check_normalized()?;
    let resource = cfg.resource()?;
    let input_wf = to_grid(input, cfg.grid)?;
    let rule = cfg.q_grid.rule()?;

    let parts = assemble_mixture(
        &rule,
        |q| branch_wavefunction(&input_wf, &resource, cfg.lambda, q).0,
        cfg.signal_dim,
        true,
    )?;

    if parts.captured < 1.0 - 1e-4 {
        return Err(SimError::MassDeficit { mass: parts.captured, required: 1.0 - 1e-4 });
    }
    let rho_raw = parts.rho_raw.expect("density requested");
    if (parts.raw_trace - parts.captured).abs() > 1e-6 {
        return Err(SimError::Contract(format!(
            "Fock-side trace {:.9} deviates from captured probability {:.9}",
            parts.raw_trace, parts.captured
        )));
    }

    let scale = C64::new(1.0 / parts.raw_trace, 0.0);
    let rho = DensityMatrix { entries: rho_raw * scale };
    let report = fock::moments_density(&rho)?;
    Ok(GateOutput { state: GateState::Deterministic(rho), records: parts.records, report })
}

/// Probabilistic gate: condition on q = 0 with no feed-forward. The output
/// is the pure state ∝ ψ_in(x)·(1 + χx³)·e^{−x²/(2g)}.
pub fn run_probabilistic(
    input: &FockVector,
    spec: &crate::resource::ResourceSpec,
    grid: GridSpec,
) -> Result<GateOutput> {
    input.check_converged()?;
    input.check_normalized()?;
    let resource = ResourceWavefunction::new(spec.chi, spec.g)?;
    let input_wf = to_grid(input, grid)?;
    let (branch, density) = branch_wavefunction(&input_wf, &resource, 1.0, 0.0);
    let normalized = branch.normalized()?;
    let state = from_grid(&normalized, spec.dim, crate::TRUNCATION_TOL)?;
    let (state, _) = state.normalized()?;
    let report = fock::moments_pure(&state)?;
    Ok(GateOutput {
        state: GateState::Probabilistic(state),
        records: vec![HomodyneRecord { q: 0.0, density, weight: 1.0 }],
        report,
    })
}

/// Two-mode wavefunction on a square grid: Ψ(u, x) with u the resource
/// coordinate and x the signal coordinate.
#[derive(Debug, Clone)]
pub struct TwoModeGrid {
    pub spec: GridSpec,
    /// values[(i, j)] = Ψ(u_i, x_j).
    pub values: Array2<C64>,
}

impl TwoModeGrid {
    /// ∫∫ |Ψ|² du dx by the product trapezoid rule.
    pub fn norm_sq(&self) -> f64 {
        let h = self.spec.dx();
        let n = self.spec.n_points;
        let mut total = 0.0;
        for i in 0..n {
            let wi = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            for j in 0..n {
                let wj = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
                total += wi * wj * self.values[[i, j]].norm_sqr();
            }
        }
        total * h * h
    }

    /// Marginal density over the resource coordinate: ∫|Ψ(u, x)|²du per x.
    pub fn marginal_signal_density(&self) -> Vec<f64> {
        let h = self.spec.dx();
        let n = self.spec.n_points;
        (0..n)
            .map(|j| {
                let col: Vec<f64> = (0..n).map(|i| self.values[[i, j]].norm_sqr()).collect();
                crate::quadrature::trapezoid(&col, h)
            })
            .collect()
    }

    /// The signal wavefunction conditioned on measuring u at grid node i.
    pub fn condition_at_node(&self, i: usize) -> GridWavefunction {
        let samples = (0..self.spec.n_points).map(|j| self.values[[i, j]]).collect();
        GridWavefunction { spec: self.spec, samples }
    }
}

/// The QND coupling as a coordinate shear: Ψ(u, x) = ψ_S(x)·φ_R(u + λx).
/// Both modes live on the signal's grid; resource values off the grid are
/// a window error when they carry weight.
pub fn apply_qnd_two_mode(
    signal: &GridWavefunction,
    resource: &GridWavefunction,
    lambda: f64,
) -> Result<TwoModeGrid> {
    if signal.spec != resource.spec {
        return Err(SimError::DimMismatch { left: signal.n_points(), right: resource.n_points() });
    }
    resource.check_window()?;
    signal.check_window()?;
    let spec = signal.spec;
    let n = spec.n_points;
    let h = spec.dx();
    let mut values = Array2::zeros((n, n));
    for i in 0..n {
        let u = spec.x_at(i);
        for j in 0..n {
            let x = spec.x_at(j);
            let y = u + lambda * x;
            let pos = (y - spec.x_min) / h;
            let k = pos.round();
            let phi = if k < 0.0 || k >= n as f64 {
                // Sheared argument beyond the resource window; the window
                // invariant makes the true value negligible there.
                C64::new(0.0, 0.0)
            } else if (pos - k).abs() < 1e-9 {
                resource.samples[k as usize]
            } else {
                // Off-node shear: linear interpolation between neighbours.
                let lo = pos.floor() as usize;
                let hi = (lo + 1).min(n - 1);
                let t = pos - lo as f64;
                resource.samples[lo] * (1.0 - t) + resource.samples[hi] * t
            };
            values[[i, j]] = signal.samples[j] * phi;
        }
    }
    // The shear is measure-preserving, so any norm deficit is probability
    // mass pushed off the u-window.
    let two = TwoModeGrid { spec, values };
    let expected = signal.norm_sq() * resource.norm_sq();
    let got = two.norm_sq();
    if (got - expected).abs() > 1e-6 * expected.max(1e-12) {
        return Err(SimError::Window(format!(
            "QND shear loses probability mass off the grid: {got:.9} vs {expected:.9}"
        )));
    }
    Ok(two)
}
