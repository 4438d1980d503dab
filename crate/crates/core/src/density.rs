use ndarray::Array2;
use num_complex::Complex64;

use crate::eigen::hermitian_eigenvalues;
use crate::error::{Error, Result};
use crate::states::FockVector;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-10;

/// Density matrix over `|0⟩..|cutoff⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: Array2<Complex64>,
}

impl DensityMatrix {
    /// Wraps a square matrix without checking the physical invariants; see
    /// [`validate`](Self::validate).
    pub fn from_entries(entries: Array2<Complex64>) -> Result<Self> {
        let (rows, cols) = entries.dim();
        if rows != cols || rows == 0 {
            return Err(Error::DimensionMismatch { left: rows, right: cols });
        }
        Ok(Self { entries })
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(state: &FockVector) -> Self {
        let amps = state.amplitudes();
        let dim = amps.len();
        let entries = Array2::from_shape_fn((dim, dim), |(k, l)| amps[k] * amps[l].conj());
        Self { entries }
    }

    /// `|n⟩⟨n|`.
    pub fn fock(n: usize, cutoff: usize) -> Result<Self> {
        if n > cutoff {
            return Err(Error::OutOfRange { index: n, cutoff });
        }
        let mut entries = Array2::zeros((cutoff + 1, cutoff + 1));
        entries[[n, n]] = Complex64::new(1.0, 0.0);
        Ok(Self { entries })
    }

    pub fn vacuum(cutoff: usize) -> Self {
        Self::fock(0, cutoff).expect("vacuum is always in range")
    }

    pub fn entries(&self) -> &Array2<Complex64> {
        &self.entries
    }

    pub fn into_entries(self) -> Array2<Complex64> {
        self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cutoff(&self) -> usize {
        self.dim() - 1
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.diag().sum()
    }

    /// Largest `|ρ_kl − conj(ρ_lk)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for k in 0..n {
            for l in k..n {
                worst = worst.max((self.entries[[k, l]] - self.entries[[l, k]].conj()).norm());
            }
        }
        worst
    }

    /// Largest elementwise deviation from another matrix of the same size.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> Result<f64> {
        self.ensure_same_dim(other)?;
        Ok(self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub(crate) fn ensure_same_dim(&self, other: &DensityMatrix) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    /// Checks Hermiticity, unit trace and positive semidefiniteness.
    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("hermiticity error {herm:e}")));
        }
        let trace = self.trace();
        if (trace - 1.0).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {trace} differs from one")));
        }
        let lowest = hermitian_eigenvalues(&self.entries)?
            .last()
            .copied()
            .unwrap_or(0.0);
        if lowest < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {lowest:e}")));
        }
        Ok(())
    }
}
