//! Fidelity, photon distribution, Mandel Q and von Neumann entropy.
//!
//! Each quantity has a matrix route working on [`DensityMatrix`]. Fidelity
//! and the photon distribution also have a series route for the even catlike
//! state, evaluated straight from the ladder coefficients without building
//! any state or matrix. Sums run in ascending index order with plain
//! accumulation, so results are bitwise reproducible.

use std::fmt;

use serde::Serialize;

use crate::algebra::LadderCoefficients;
use crate::channel::{ln_factorials, DampingChannel};
use crate::density::DensityMatrix;
use crate::eigen::hermitian_eigenvalues;
use crate::error::{Error, Result};
use crate::states::cat_normalization;

/// Eigenvalues in `[-NEGATIVE_DUST, 0)` are treated as zero by the entropy.
pub const NEGATIVE_DUST: f64 = 1e-10;
/// Eigenvalues below `-INVALID_EIGENVALUE` reject the state.
pub const INVALID_EIGENVALUE: f64 = 1e-8;
/// `⟨n̂⟩` below this is treated as the vacuum by [`mandel_q`].
pub const VACUUM_MEAN: f64 = 1e-12;
/// Largest normalized weight allowed on the last retained Fock level by the
/// series routes.
const SERIES_TAIL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "n")]
pub enum Observable {
    Fidelity,
    PhotonProbability(usize),
    MandelQ,
    VonNeumannEntropy,
    MeanPhotonNumber,
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observable::Fidelity => f.write_str("fidelity"),
            Observable::PhotonProbability(n) => write!(f, "photons(n={n})"),
            Observable::MandelQ => f.write_str("mandel"),
            Observable::VonNeumannEntropy => f.write_str("entropy"),
            Observable::MeanPhotonNumber => f.write_str("mean-n"),
        }
    }
}

/// `Tr(ρ(t) ρ(0))`.
pub fn fidelity(rho_t: &DensityMatrix, rho_0: &DensityMatrix) -> Result<f64> {
    rho_t.ensure_same_dim(rho_0)?;
    let a = rho_t.entries();
    let b = rho_0.entries();
    let dim = rho_t.dim();
    let mut acc = num_complex::Complex64::new(0.0, 0.0);
    for k in 0..dim {
        for l in 0..dim {
            acc += a[[k, l]] * b[[l, k]];
        }
    }
    if acc.im.abs() > 1e-12 {
        return Err(Error::InvalidState(format!("fidelity has imaginary part {:e}", acc.im)));
    }
    Ok(acc.re)
}

/// `P_n = ⟨n|ρ|n⟩`.
pub fn photon_probability(rho: &DensityMatrix, n: usize) -> Result<f64> {
    if n > rho.cutoff() {
        return Err(Error::OutOfRange {
            index: n,
            cutoff: rho.cutoff(),
        });
    }
    let p = rho.entries()[[n, n]];
    if p.im.abs() > 1e-12 {
        return Err(Error::InvalidState(format!("diagonal entry {n} is not real")));
    }
    Ok(p.re)
}

/// `(⟨n̂⟩, ⟨n̂²⟩)` from the diagonal.
pub fn photon_moments(rho: &DensityMatrix) -> (f64, f64) {
    let mut first = 0.0;
    let mut second = 0.0;
    for (n, p) in rho.entries().diag().iter().enumerate() {
        let n = n as f64;
        first += n * p.re;
        second += n * n * p.re;
    }
    (first, second)
}

pub fn mean_photon_number(rho: &DensityMatrix) -> f64 {
    photon_moments(rho).0
}

/// `Q = (⟨(Δn̂)²⟩ − ⟨n̂⟩)/⟨n̂⟩`, defined as zero when `⟨n̂⟩ < 1e-12`.
pub fn mandel_q(rho: &DensityMatrix) -> f64 {
    let (mean, second) = photon_moments(rho);
    if mean < VACUUM_MEAN {
        return 0.0;
    }
    (second - mean * mean - mean) / mean
}

/// `S = −Σ λ ln λ` (natural log).
///
/// Read as the entanglement with the environment only when system and bath
/// are jointly pure.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let values = hermitian_eigenvalues(rho.entries())?;
    let mut entropy = 0.0;
    for lambda in values {
        if lambda < -INVALID_EIGENVALUE {
            return Err(Error::InvalidState(format!("eigenvalue {lambda:e} is negative")));
        }
        if lambda > 0.0 {
            entropy -= lambda * lambda.ln();
        }
    }
    Ok(entropy.max(0.0))
}

/// Even-cat coefficients `c'_n = (zⁿ + (−z)ⁿ)/fact_n` in log form:
/// `ln|c'_n|` for even `n`, `-inf` for odd `n`.
fn log_even_terms(z: f64, coeffs: &LadderCoefficients) -> Vec<f64> {
    let ln_z = z.abs().ln();
    coeffs
        .log_norm_factorial()
        .iter()
        .enumerate()
        .map(|(n, lf)| {
            if n % 2 == 1 {
                f64::NEG_INFINITY
            } else if n == 0 {
                std::f64::consts::LN_2
            } else {
                std::f64::consts::LN_2 + n as f64 * ln_z - lf
            }
        })
        .collect()
}

fn ensure_series_converged(z: f64, coeffs: &LadderCoefficients) -> Result<()> {
    let lf = coeffs.log_norm_factorial();
    let cutoff = coeffs.cutoff();
    if z == 0.0 {
        return Ok(());
    }
    let ln_x = 2.0 * z.abs().ln();
    let doubled: Vec<f64> = lf.iter().enumerate().map(|(n, l)| n as f64 * ln_x - 2.0 * l).collect();
    let tail = (doubled[cutoff] - crate::special::log_sum_exp(&doubled)).exp();
    if tail > SERIES_TAIL_TOL {
        return Err(Error::Truncation {
            cutoff,
            tail,
            tol: SERIES_TAIL_TOL,
        });
    }
    Ok(())
}

/// `(𝒩_+)² N²`, the squared amplitude prefactor of the even cat.
fn even_prefactor(z: f64, coeffs: &LadderCoefficients) -> Result<f64> {
    if z == 0.0 {
        // |ψ_+⟩ = |0⟩ and c'_0 = 2, so the prefactor is 1/4.
        return Ok(0.25);
    }
    let norms = cat_normalization(z, coeffs)?;
    Ok((norms.n_plus * norms.n_coherent).powi(2))
}

/// Closed-form fidelity of the damped even catlike state:
///
/// `F = 𝒩_+⁴ N⁴ Σ_j Σ_{n,m≥j} sqrt(C(n,j) C(m,j)) e^{−(n+m−2j)γt/2}
///      (1−e^{−γt})^j c'_n c'_m c'_{n−j} c'_{m−j}`.
///
/// The `(n, m)` double sum is the square of a single sum over `n`, which is
/// how it is evaluated. Sums are truncated at the ladder cutoff.
pub fn fidelity_series(z: f64, coeffs: &LadderCoefficients, channel: &DampingChannel) -> Result<f64> {
    ensure_series_converged(z, coeffs)?;
    let cutoff = coeffs.cutoff();
    let terms = log_even_terms(z, coeffs);
    let ln_fact = ln_factorials(cutoff);
    let (ln_keep, ln_lose) = channel.log_weights();
    let prefactor = even_prefactor(z, coeffs)?;

    let mut total = 0.0;
    for j in (0..=cutoff).step_by(2) {
        if j > 0 && ln_lose == f64::NEG_INFINITY {
            break;
        }
        let lose = if j == 0 { 0.0 } else { j as f64 * ln_lose };
        let mut inner = 0.0;
        for n in j..=cutoff {
            let log_term = 0.5 * (ln_fact[n] - ln_fact[n - j] - ln_fact[j])
                + 0.5 * (n - j) as f64 * ln_keep
                + terms[n]
                + terms[n - j];
            inner += log_term.exp();
        }
        total += lose.exp() * inner * inner;
    }
    Ok(prefactor * prefactor * total)
}

/// Closed-form photon distribution of the damped even catlike state:
///
/// `P_n = N² 𝒩_+² Σ_j C(n+j, j) e^{−nγt} (1−e^{−γt})^j
///        (1+(−1)^{n+j})² |z|^{2(n+j)} / (fact_{n+j})²`.
pub fn photon_probability_series(
    n: usize,
    z: f64,
    coeffs: &LadderCoefficients,
    channel: &DampingChannel,
) -> Result<f64> {
    let cutoff = coeffs.cutoff();
    if n > cutoff {
        return Err(Error::OutOfRange { index: n, cutoff });
    }
    ensure_series_converged(z, coeffs)?;
    let terms = log_even_terms(z, coeffs);
    let ln_fact = ln_factorials(cutoff);
    let (ln_keep, ln_lose) = channel.log_weights();
    let prefactor = even_prefactor(z, coeffs)?;

    let mut total = 0.0;
    for j in 0..=cutoff - n {
        if (n + j) % 2 == 1 {
            continue;
        }
        if j > 0 && ln_lose == f64::NEG_INFINITY {
            break;
        }
        let lose = if j == 0 { 0.0 } else { j as f64 * ln_lose };
        // c'_{n+j}² already carries the (1 + (−1)^{n+j})² = 4 factor.
        let log_term = ln_fact[n + j] - ln_fact[n] - ln_fact[j] + n as f64 * ln_keep + lose + 2.0 * terms[n + j];
        total += log_term.exp();
    }
    Ok(prefactor * total)
}
