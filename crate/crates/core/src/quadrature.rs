//! Gauss–Legendre nodes and weights, plus the trapezoid rule used on the
//! uniform position grid.
//!
//! Nodes are found by Newton iteration on the Legendre recurrence; for the
//! orders used here (≤ a few hundred) this is accurate to machine precision.

use crate::{Result, SimError};

/// A quadrature rule on an interval: paired nodes and weights.
#[derive(Debug, Clone)]
pub struct QuadRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadRule {
    /// Gauss–Legendre rule with `n` nodes on `[a, b]`.
    pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Result<Self> {
        if n < 2 {
            return Err(SimError::InvalidDimension { dim: n, reason: "quadrature needs at least 2 nodes" });
        }
        if b <= a || !a.is_finite() || !b.is_finite() {
            return Err(SimError::Domain {
                field: "quadrature interval",
                value: b - a,
                reason: "requires finite bounds with b > a",
            });
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess for the i-th root of P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        // Map [-1, 1] -> [a, b].
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        for i in 0..n {
            nodes[i] = mid + half * nodes[i];
            weights[i] *= half;
        }
        Ok(QuadRule { nodes, weights })
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Trapezoid rule over uniformly spaced samples with step `dx`.
pub fn trapezoid(samples: &[f64], dx: f64) -> f64 {
    if samples.len() < 2 {
        return 0.0;
    }
    let interior: f64 = samples[1..samples.len() - 1].iter().sum();
    dx * (0.5 * samples[0] + interior + 0.5 * samples[samples.len() - 1])
}
