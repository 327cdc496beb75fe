//! Dense complex linear algebra for small Hermitian problems.
//!
//! Everything here is sized for truncation dimensions ≤ ~100, where a cyclic
//! Jacobi eigensolver is exact to machine precision and nothing heavier is
//! warranted.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::{Result, SimError};

/// Identity matrix of size `dim`.
pub fn identity(dim: usize) -> Array2<C64> {
    Array2::from_diag_elem(dim, C64::new(1.0, 0.0))
}

/// Conjugate transpose.
pub fn adjoint(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

/// Largest entrywise magnitude of `a − b`.
pub fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest entrywise magnitude of `a − a†`.
pub fn hermiticity_residual(a: &Array2<C64>) -> f64 {
    max_abs_diff(a, &adjoint(a))
}

/// Largest entrywise magnitude of `U·U† − I`, restricted to rows and columns
/// below `dim − skip_edge`. Truncated operators are unitary only away from
/// the truncation edge.
pub fn unitarity_residual(u: &Array2<C64>, skip_edge: usize) -> f64 {
    let dim = u.nrows();
    let prod = u.dot(&adjoint(u));
    let upper = dim.saturating_sub(skip_edge);
    let mut worst = 0.0f64;
    for i in 0..upper {
        for j in 0..upper {
            let expect = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            worst = worst.max((prod[[i, j]] - expect).norm());
        }
    }
    worst
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matching eigenvectors as
/// the columns of a unitary matrix.
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Array2<C64>,
}

/// Diagonalize the Hermitian matrix `h`. Fails if `h` is not Hermitian to
/// within `herm_tol` (pass the contract tolerance of the call site).
pub fn eigh(h: &Array2<C64>, herm_tol: f64) -> Result<HermitianEigen> {
    let dim = h.nrows();
    if dim != h.ncols() {
        return Err(SimError::DimMismatch { left: dim, right: h.ncols() });
    }
    let res = hermiticity_residual(h);
    if res > herm_tol {
        return Err(SimError::Contract(format!(
            "eigh requires a Hermitian matrix; residual {res:.3e} > {herm_tol:.3e}"
        )));
    }

    let mut a = h.clone();
    // Symmetrize exactly so rounding in the input cannot bias the sweeps.
    for i in 0..dim {
        for j in (i + 1)..dim {
            let m = (a[[i, j]] + a[[j, i]].conj()) * 0.5;
            a[[i, j]] = m;
            a[[j, i]] = m.conj();
        }
        a[[i, i]] = C64::new(a[[i, i]].re, 0.0);
    }
    let mut v = identity(dim);

    let scale: f64 = a.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let off = |m: &Array2<C64>| -> f64 {
        let mut s = 0.0;
        for i in 0..dim {
            for j in (i + 1)..dim {
                s += m[[i, j]].norm_sqr();
            }
        }
        s.sqrt()
    };

    const MAX_SWEEPS: usize = 60;
    for _ in 0..MAX_SWEEPS {
        if off(&a) <= 1e-15 * scale * dim as f64 {
            break;
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                let beta = a[[p, q]];
                let b = beta.norm();
                if b <= 1e-300 {
                    continue;
                }
                let u = beta / b;
                let alpha = a[[p, p]].re;
                let gamma = a[[q, q]].re;
                let tau = (gamma - alpha) / (2.0 * b);
                let t = if tau >= 0.0 {
                    -1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // A <- W† A W with W = [[c, -s·u], [s·u*, c]] on (p, q).
                let su = C64::new(s, 0.0) * u;
                let suc = su.conj();
                for k in 0..dim {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = akp * c + akq * suc;
                    a[[k, q]] = akq * c - akp * su;
                }
                for k in 0..dim {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = apk * c + aqk * su;
                    a[[q, k]] = aqk * c - apk * suc;
                }
                a[[p, q]] = C64::new(0.0, 0.0);
                a[[q, p]] = C64::new(0.0, 0.0);
                a[[p, p]] = C64::new(a[[p, p]].re, 0.0);
                a[[q, q]] = C64::new(a[[q, q]].re, 0.0);

                for k in 0..dim {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = vkp * c + vkq * suc;
                    v[[k, q]] = vkq * c - vkp * su;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..dim).collect();
    let diag: Vec<f64> = (0..dim).map(|i| a[[i, i]].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());

    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = Array2::zeros((dim, dim));
    for (col, &src) in order.iter().enumerate() {
        for row in 0..dim {
            vectors[[row, col]] = v[[row, src]];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// e^{iH} for Hermitian `h`, via eigendecomposition.
pub fn expi_hermitian(h: &Array2<C64>, herm_tol: f64) -> Result<Array2<C64>> {
    let eig = eigh(h, herm_tol)?;
    let dim = h.nrows();
    let mut phased = eig.vectors.clone();
    for (col, lam) in eig.values.iter().enumerate() {
        let phase = C64::new(0.0, *lam).exp();
        for row in 0..dim {
            phased[[row, col]] *= phase;
        }
    }
    Ok(phased.dot(&adjoint(&eig.vectors)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eigh_diagonalizes_known_2x2() {
        // [[0, 1], [1, 2]] has eigenvalues 1 ± √2.
        let mut h = Array2::zeros((2, 2));
        h[[0, 1]] = c(1.0, 0.0);
        h[[1, 0]] = c(1.0, 0.0);
        h[[1, 1]] = c(2.0, 0.0);
        let eig = eigh(&h, 1e-12).unwrap();
        assert!((eig.values[0] - (1.0 - 2f64.sqrt())).abs() < 1e-14);
        assert!((eig.values[1] - (1.0 + 2f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn eigh_handles_complex_offdiagonals() {
        // Pauli-y: eigenvalues ±1.
        let mut h = Array2::zeros((2, 2));
        h[[0, 1]] = c(0.0, -1.0);
        h[[1, 0]] = c(0.0, 1.0);
        let eig = eigh(&h, 1e-12).unwrap();
        assert!((eig.values[0] + 1.0).abs() < 1e-14);
        assert!((eig.values[1] - 1.0).abs() < 1e-14);
        // V must be unitary.
        assert!(unitarity_residual(&eig.vectors, 0) < 1e-13);
    }

    #[test]
    fn eigh_reconstructs_random_hermitian() {
        // Deterministic pseudo-random Hermitian matrix.
        let dim = 24;
        let mut h: Array2<C64> = Array2::zeros((dim, dim));
        let mut state = 0x243f6a8885a308d3u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state as f64 / u64::MAX as f64) - 0.5
        };
        for i in 0..dim {
            h[[i, i]] = c(next(), 0.0);
            for j in (i + 1)..dim {
                let z = c(next(), next());
                h[[i, j]] = z;
                h[[j, i]] = z.conj();
            }
        }
        let eig = eigh(&h, 1e-12).unwrap();
        let mut lam: Array2<C64> = Array2::zeros((dim, dim));
        for i in 0..dim {
            lam[[i, i]] = c(eig.values[i], 0.0);
        }
        let rebuilt = eig.vectors.dot(&lam).dot(&adjoint(&eig.vectors));
        assert!(max_abs_diff(&rebuilt, &h) < 1e-12);
    }

    #[test]
    fn expi_of_zero_is_identity() {
        let h: Array2<C64> = Array2::zeros((6, 6));
        let u = expi_hermitian(&h, 1e-12).unwrap();
        assert!(max_abs_diff(&u, &identity(6)) < 1e-14);
    }

    #[test]
    fn expi_rejects_non_hermitian() {
        let mut h: Array2<C64> = Array2::zeros((3, 3));
        h[[0, 1]] = c(1.0, 0.0);
        assert!(expi_hermitian(&h, 1e-12).is_err());
    }
}
