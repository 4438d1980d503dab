//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each pivot `(p, q)` is cleared by a unitary rotation that first removes
//! the phase of `a_pq` and then applies a real Givens rotation. Sweeps stop
//! once the off-diagonal Frobenius norm falls below `1e-12` of the total norm.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_SWEEPS: usize = 100;
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;
const INPUT_HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Sorted descending.
    pub values: Vec<f64>,
    /// Column `i` is the eigenvector of `values[i]`.
    pub vectors: Array2<Complex64>,
}

impl HermitianEigen {
    /// `V Λ V†`.
    pub fn reconstruct(&self) -> Array2<Complex64> {
        let n = self.values.len();
        Array2::from_shape_fn((n, n), |(k, l)| {
            (0..n)
                .map(|i| self.vectors[[k, i]] * self.values[i] * self.vectors[[l, i]].conj())
                .sum()
        })
    }
}

fn off_diagonal_norm(a: &Array2<Complex64>) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for p in 0..n {
        for q in 0..n {
            if p != q {
                sum += a[[p, q]].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Full eigendecomposition of a Hermitian matrix.
pub fn hermitian_eigen(m: &Array2<Complex64>) -> Result<HermitianEigen> {
    let (n, cols) = m.dim();
    if n != cols {
        return Err(Error::DimensionMismatch { left: n, right: cols });
    }
    if m.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::NonFinite("eigensolver input"));
    }
    for k in 0..n {
        for l in k..n {
            let err = (m[[k, l]] - m[[l, k]].conj()).norm();
            if err > INPUT_HERMITIAN_TOL {
                return Err(Error::InvalidState(format!(
                    "matrix is not Hermitian (error {err:e} at ({k}, {l}))"
                )));
            }
        }
    }

    let mut a = m.clone();
    let mut v = Array2::<Complex64>::eye(n);
    let total = m.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let threshold = OFF_DIAGONAL_TOL * total;

    let mut off = off_diagonal_norm(&a);
    let mut sweeps = 0;
    while off > threshold {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off_norm: off });
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
        off = off_diagonal_norm(&a);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[[j, j]].re.total_cmp(&a[[i, i]].re));
    let values = order.iter().map(|&i| a[[i, i]].re).collect();
    let vectors = Array2::from_shape_fn((n, n), |(k, c)| v[[k, order[c]]]);
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues only, sorted descending.
pub fn hermitian_eigenvalues(m: &Array2<Complex64>) -> Result<Vec<f64>> {
    hermitian_eigen(m).map(|e| e.values)
}

fn rotate(a: &mut Array2<Complex64>, v: &mut Array2<Complex64>, p: usize, q: usize) {
    let apq = a[[p, q]];
    let r = apq.norm();
    if r < f64::MIN_POSITIVE {
        return;
    }
    let phase = apq / r;
    let app = a[[p, p]].re;
    let aqq = a[[q, q]].re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let conj_phase = phase.conj();
    let n = a.nrows();

    for k in 0..n {
        let akp = a[[k, p]];
        let akq = a[[k, q]];
        a[[k, p]] = akp * c - akq * conj_phase * s;
        a[[k, q]] = akp * s + akq * conj_phase * c;
    }
    for k in 0..n {
        let apk = a[[p, k]];
        let aqk = a[[q, k]];
        a[[p, k]] = apk * c - aqk * phase * s;
        a[[q, k]] = apk * s + aqk * phase * c;
    }
    a[[p, q]] = Complex64::new(0.0, 0.0);
    a[[q, p]] = Complex64::new(0.0, 0.0);
    a[[p, p]] = Complex64::new(a[[p, p]].re, 0.0);
    a[[q, q]] = Complex64::new(a[[q, q]].re, 0.0);

    for k in 0..n {
        let vkp = v[[k, p]];
        let vkq = v[[k, q]];
        v[[k, p]] = vkp * c - vkq * conj_phase * s;
        v[[k, q]] = vkp * s + vkq * conj_phase * c;
    }
}
