//! Nonlinear coherent states `|z⟩ = N(|z|) Σ zⁿ/fact_n |n⟩` and the catlike
//! superpositions `|ψ_±⟩ ∝ |z⟩ ± |−z⟩` in a truncated Fock basis.
//!
//! `z` is real throughout. Normalizations come from direct summation over the
//! tabulated factorials; the hypergeometric closed forms are cross-checks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraKind, DeformationParams, LadderCoefficients};
use crate::error::{Error, Result};
use crate::special::{hypergeometric_pfq, log_sum_exp};

/// Default relative tail mass allowed beyond the Fock cutoff.
pub const DEFAULT_TAIL_TOL: f64 = 1e-14;

/// Default hard cap for adaptive cutoff selection.
pub const DEFAULT_CUTOFF_CAP: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    None,
    Even,
    Odd,
}

impl Parity {
    /// Whether the Fock component `n` survives this parity.
    pub fn allows(self, n: usize) -> bool {
        match self {
            Parity::None => true,
            Parity::Even => n.is_multiple_of(2),
            Parity::Odd => !n.is_multiple_of(2),
        }
    }
}

/// Unit-norm state over `|0⟩..|cutoff⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amplitudes: Vec<Complex64>,
    kind: AlgebraKind,
    params: DeformationParams,
    z: f64,
    parity: Parity,
}

impl FockVector {
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn cutoff(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn kind(&self) -> AlgebraKind {
        self.kind
    }

    pub fn params(&self) -> &DeformationParams {
        &self.params
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &FockVector) -> Result<Complex64> {
        if self.amplitudes.len() != other.amplitudes.len() {
            return Err(Error::DimensionMismatch {
                left: self.amplitudes.len(),
                right: other.amplitudes.len(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Largest `|norm_n·c_{n+1} − z·c_n|` over `n < cutoff`: how far the
    /// state is from an eigenstate of the lowering operator.
    pub fn lowering_residual(&self, coeffs: &LadderCoefficients) -> Result<f64> {
        let mut worst = 0.0_f64;
        for n in 0..self.cutoff() {
            let lowered = self.amplitudes[n + 1] * coeffs.ladder_norm(n)?;
            worst = worst.max((lowered - self.amplitudes[n] * self.z).norm());
        }
        Ok(worst)
    }
}

/// `ln|zⁿ/fact_n|` for `n = 0..=cutoff`, with `-inf` where the term vanishes.
fn log_terms(z: f64, coeffs: &LadderCoefficients) -> Vec<f64> {
    let ln_z = z.abs().ln();
    coeffs
        .log_norm_factorial()
        .iter()
        .enumerate()
        .map(|(n, lf)| if n == 0 { 0.0 } else if z == 0.0 { f64::NEG_INFINITY } else { n as f64 * ln_z - lf })
        .collect()
}

fn signed_power(z: f64, n: usize) -> f64 {
    if z < 0.0 && n % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// `ln N(|z|)` from the truncated direct sum `Σ |z|^{2n}/(fact_n)²`.
fn log_coherent_normalization(z: f64, coeffs: &LadderCoefficients) -> f64 {
    let doubled: Vec<f64> = log_terms(z, coeffs).iter().map(|t| 2.0 * t).collect();
    -0.5 * log_sum_exp(&doubled)
}

/// `N(|z|)` by direct summation up to the ladder cutoff.
pub fn coherent_normalization(z: f64, coeffs: &LadderCoefficients) -> f64 {
    log_coherent_normalization(z, coeffs).exp()
}

fn check_tail(amplitudes: &[Complex64], tol: f64) -> Result<()> {
    let cutoff = amplitudes.len() - 1;
    let tail = amplitudes[cutoff].norm_sqr();
    if tail < tol || cutoff == 0 {
        Ok(())
    } else {
        Err(Error::Truncation { cutoff, tail, tol })
    }
}

/// Coherent state `c_n = N(|z|) zⁿ / fact_n` over the ladder's cutoff.
///
/// Fails if the last amplitude carries more than [`DEFAULT_TAIL_TOL`] of the
/// probability.
pub fn coherent_amplitudes(z: f64, coeffs: &LadderCoefficients) -> Result<FockVector> {
    if !z.is_finite() {
        return Err(Error::NonFinite("coherent amplitude z"));
    }
    let ln_norm = log_coherent_normalization(z, coeffs);
    let amplitudes: Vec<Complex64> = log_terms(z, coeffs)
        .into_iter()
        .enumerate()
        .map(|(n, t)| Complex64::new(signed_power(z, n) * (t + ln_norm).exp(), 0.0))
        .collect();
    check_tail(&amplitudes, DEFAULT_TAIL_TOL)?;
    Ok(FockVector {
        amplitudes,
        kind: coeffs.kind(),
        params: *coeffs.params(),
        z,
        parity: Parity::None,
    })
}

/// Even/odd catlike state `(|z⟩ ± |−z⟩)`, renormalized after summation.
pub fn cat_state(z: f64, parity: Parity, coeffs: &LadderCoefficients) -> Result<FockVector> {
    let sign = match parity {
        Parity::Even => 1.0,
        Parity::Odd if z == 0.0 => return Err(Error::OddCatAtOrigin),
        Parity::Odd => -1.0,
        Parity::None => return coherent_amplitudes(z, coeffs),
    };
    let plus = coherent_amplitudes(z, coeffs)?;
    let minus = coherent_amplitudes(-z, coeffs)?;
    let mut amplitudes: Vec<Complex64> = plus
        .amplitudes
        .iter()
        .zip(&minus.amplitudes)
        .enumerate()
        .map(|(n, (p, m))| if parity.allows(n) { p + m * sign } else { Complex64::new(0.0, 0.0) })
        .collect();
    let norm = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for c in &mut amplitudes {
        *c /= norm;
    }
    Ok(FockVector {
        amplitudes,
        kind: coeffs.kind(),
        params: *coeffs.params(),
        z,
        parity,
    })
}

/// The constants `𝒩_+(|z|)`, `𝒩_−(|z|)` and `N(|z|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CatNormalization {
    pub n_plus: f64,
    pub n_minus: f64,
    pub n_coherent: f64,
}

/// `𝒩_± = (2 ± 2N² Σ (−1)ⁿ |z|^{2n}/(fact_n)²)^{−1/2}` by direct summation.
///
/// `1 ± N² Σ (−1)ⁿ …` equals twice the even/odd share of the coherent weight,
/// which is summed directly to avoid cancellation at small `|z|`.
/// Fails at `z = 0`, where `𝒩_−` diverges.
pub fn cat_normalization(z: f64, coeffs: &LadderCoefficients) -> Result<CatNormalization> {
    if z == 0.0 {
        return Err(Error::OddCatAtOrigin);
    }
    let doubled: Vec<f64> = log_terms(z, coeffs).iter().map(|t| 2.0 * t).collect();
    let total = log_sum_exp(&doubled);
    let split = |want_even: bool| -> f64 {
        let part: Vec<f64> = doubled
            .iter()
            .enumerate()
            .map(|(n, t)| if (n % 2 == 0) == want_even { *t } else { f64::NEG_INFINITY })
            .collect();
        (log_sum_exp(&part) - total).exp()
    };
    Ok(CatNormalization {
        n_plus: (4.0 * split(true)).powf(-0.5),
        n_minus: (4.0 * split(false)).powf(-0.5),
        n_coherent: (-0.5 * total).exp(),
    })
}

/// Hypergeometric form of `N(|z|)^{-2}` as a function of `x = |z|²`:
/// `₂F₃(d+1, d+1; α, β, s; x)` for su(1,1) and `₁F₁(d+1; s; x)` for GHA,
/// with `s = d + a − e/d + 1`.
pub fn normalization_series(kind: AlgebraKind, params: &DeformationParams, x: f64) -> Result<f64> {
    let DeformationParams { a, d, e } = *params;
    let s = d + a - e / d + 1.0;
    match kind {
        AlgebraKind::Gha => hypergeometric_pfq(&[d + 1.0], &[s], x),
        AlgebraKind::GeneralizedSu11 => {
            let (alpha, beta) = params.su11_alpha_beta().ok_or_else(|| {
                Error::ClosedFormInapplicable("negative discriminant: α, β are complex".into())
            })?;
            hypergeometric_pfq(&[d + 1.0, d + 1.0], &[alpha, beta, s], x)
        }
    }
}

/// `N(|z|)` through the hypergeometric closed form.
pub fn normalization_hypergeometric(kind: AlgebraKind, z: f64, params: &DeformationParams) -> Result<f64> {
    let f = normalization_series(kind, params, z * z)?;
    if f <= 0.0 {
        return Err(Error::ClosedFormInapplicable(format!("series value {f} is not positive")));
    }
    Ok(f.powf(-0.5))
}

/// `𝒩_± = [2 ± 2 F(−|z|²)/F(|z|²)]^{−1/2}` through the hypergeometric
/// ratio. Returns `(𝒩_+, 𝒩_−)`.
pub fn cat_normalization_hypergeometric(
    kind: AlgebraKind,
    z: f64,
    params: &DeformationParams,
) -> Result<(f64, f64)> {
    if z == 0.0 {
        return Err(Error::OddCatAtOrigin);
    }
    let x = z * z;
    let ratio = normalization_series(kind, params, -x)? / normalization_series(kind, params, x)?;
    Ok(((2.0 + 2.0 * ratio).powf(-0.5), (2.0 - 2.0 * ratio).powf(-0.5)))
}

/// Smallest cutoff whose inclusive tail `Σ_{n≥N} |z|^{2n}/(fact_n)²` is
/// below `tol` times the head `Σ_{n<N}`. The ladder is probed up to
/// `hard_cap`.
pub fn select_cutoff(
    kind: AlgebraKind,
    params: &DeformationParams,
    z: f64,
    tol: f64,
    hard_cap: usize,
) -> Result<usize> {
    if !(tol > 0.0 && tol <= 1e-6) {
        return Err(Error::Config(format!("truncation tolerance {tol} outside (0, 1e-6]")));
    }
    if z == 0.0 {
        return Ok(1);
    }
    let probe = LadderCoefficients::build(kind, *params, hard_cap)?;
    let doubled: Vec<f64> = log_terms(z, &probe).iter().map(|t| 2.0 * t).collect();
    let ln_tol = tol.ln();
    // Suffix log-sums so each candidate costs O(1).
    let mut suffix = vec![f64::NEG_INFINITY; doubled.len() + 1];
    for n in (0..doubled.len()).rev() {
        suffix[n] = log_sum_exp(&[suffix[n + 1], doubled[n]]);
    }
    let mut head = doubled[0];
    for cutoff in 1..=hard_cap {
        if suffix[cutoff] - head < ln_tol {
            return Ok(cutoff);
        }
        head = log_sum_exp(&[head, doubled[cutoff]]);
    }
    Err(Error::Truncation {
        cutoff: hard_cap,
        tail: (suffix[hard_cap] - head).exp(),
        tol,
    })
}

/// [`select_cutoff`] followed by building the ladder at that cutoff.
pub fn adaptive_ladder(kind: AlgebraKind, params: &DeformationParams, z: f64) -> Result<LadderCoefficients> {
    let cutoff = select_cutoff(kind, params, z, DEFAULT_TAIL_TOL, DEFAULT_CUTOFF_CAP)?;
    LadderCoefficients::build(kind, *params, cutoff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const FIG: DeformationParams = DeformationParams { a: 0.7, d: 0.2, e: 0.1 };

    fn ladder(kind: AlgebraKind, p: DeformationParams, cutoff: usize) -> LadderCoefficients {
        LadderCoefficients::build(kind, p, cutoff).unwrap()
    }

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    #[test]
    fn vacuum_at_origin() {
        for kind in AlgebraKind::ALL {
            let v = coherent_amplitudes(0.0, &ladder(kind, FIG, 8)).unwrap();
            assert_eq!(v.amplitudes()[0], Complex64::new(1.0, 0.0));
            assert!(v.amplitudes()[1..].iter().all(|c| *c == Complex64::new(0.0, 0.0)));
        }
    }

    #[test]
    fn glauber_coherent_state() {
        let h = DeformationParams::harmonic(0.2);
        for z in [1.0, -0.7, 2.0] {
            let v = coherent_amplitudes(z, &ladder(AlgebraKind::Gha, h, 60)).unwrap();
            for (n, c) in v.amplitudes().iter().enumerate() {
                let expect = (-z * z / 2.0).exp() * z.powi(n as i32) / factorial(n).sqrt();
                assert!((c.re - expect).abs() < 1e-12 && c.im == 0.0, "n={n}");
            }
        }
    }

    #[test]
    fn su11_harmonic_coherent_state() {
        let h = DeformationParams::harmonic(0.2);
        let v = coherent_amplitudes(1.0, &ladder(AlgebraKind::GeneralizedSu11, h, 30)).unwrap();
        let norm: f64 = (0..=30).map(|n| 1.0 / factorial(n).powi(2)).sum::<f64>().powf(-0.5);
        for (n, c) in v.amplitudes().iter().enumerate() {
            assert!((c.re - norm / factorial(n)).abs() < 1e-14);
        }
    }

    #[test]
    fn coherent_state_is_lowering_eigenstate() {
        for kind in AlgebraKind::ALL {
            for z in [0.5, 1.0, 3.0] {
                let coeffs = adaptive_ladder(kind, &FIG, z).unwrap();
                let v = coherent_amplitudes(z, &coeffs).unwrap();
                assert!((v.norm_sqr() - 1.0).abs() < 1e-12);
                assert!(v.lowering_residual(&coeffs).unwrap() < 1e-8);
            }
        }
    }

    #[test]
    fn truncation_is_reported() {
        let coeffs = ladder(AlgebraKind::Gha, DeformationParams::harmonic(0.2), 5);
        assert!(matches!(coherent_amplitudes(3.0, &coeffs), Err(Error::Truncation { .. })));
    }

    #[test]
    fn hypergeometric_normalization_matches_direct_sum() {
        let h = DeformationParams::harmonic(0.2);
        assert_eq!(normalization_hypergeometric(AlgebraKind::GeneralizedSu11, 0.0, &h).unwrap(), 1.0);
        let oracle: f64 = (0..40).map(|n| 1.0 / factorial(n).powi(2)).sum::<f64>().powf(-0.5);
        assert_relative_eq!(
            normalization_hypergeometric(AlgebraKind::GeneralizedSu11, 1.0, &h).unwrap(),
            oracle,
            max_relative = 1e-12
        );
        for p in [FIG, DeformationParams::new(0.9, 0.2, 0.1), DeformationParams::new(0.2, 0.2, 0.1)] {
            for kind in AlgebraKind::ALL {
                for z in [0.3, 1.0, 2.0, 3.0] {
                    let coeffs = adaptive_ladder(kind, &p, z).unwrap();
                    let direct = coherent_normalization(z, &coeffs);
                    let closed = normalization_hypergeometric(kind, z, &p).unwrap();
                    assert_relative_eq!(direct, closed, max_relative = 1e-8);
                    let cat = cat_normalization(z, &coeffs).unwrap();
                    let (plus, minus) = cat_normalization_hypergeometric(kind, z, &p).unwrap();
                    assert_relative_eq!(cat.n_plus, plus, max_relative = 1e-8);
                    assert_relative_eq!(cat.n_minus, minus, max_relative = 1e-8);
                    assert_relative_eq!(cat.n_coherent, direct, max_relative = 1e-14);
                }
            }
        }
    }

    #[test]
    fn glauber_cat_normalization() {
        let h = DeformationParams::harmonic(0.2);
        for z in [0.5f64, 1.0, 2.0] {
            let coeffs = adaptive_ladder(AlgebraKind::Gha, &h, z).unwrap();
            let cat = cat_normalization(z, &coeffs).unwrap();
            let x = 2.0 * z * z;
            assert!((cat.n_plus - (2.0 + 2.0 * (-x).exp()).powf(-0.5)).abs() < 1e-12);
            assert!((cat.n_minus - (2.0 - 2.0 * (-x).exp()).powf(-0.5)).abs() < 1e-12);
        }
        // (2 + 2e^{-2})^{-1/2}
        let coeffs = adaptive_ladder(AlgebraKind::Gha, &h, 1.0).unwrap();
        assert!((cat_normalization(1.0, &coeffs).unwrap().n_plus - 0.663_625_300_142_287_5).abs() < 1e-12);
    }

    #[test]
    fn cat_state_parity_and_orthogonality() {
        for kind in AlgebraKind::ALL {
            let coeffs = adaptive_ladder(kind, &FIG, 1.0).unwrap();
            let even = cat_state(1.0, Parity::Even, &coeffs).unwrap();
            let odd = cat_state(1.0, Parity::Odd, &coeffs).unwrap();
            assert!((even.norm_sqr() - 1.0).abs() < 1e-12);
            assert!((odd.norm_sqr() - 1.0).abs() < 1e-12);
            for n in 0..=coeffs.cutoff() {
                let zero = Complex64::new(0.0, 0.0);
                if n % 2 == 1 {
                    assert_eq!(even.amplitudes()[n], zero);
                } else {
                    assert_eq!(odd.amplitudes()[n], zero);
                }
            }
            assert!(even.inner(&odd).unwrap().norm() < 1e-12);
            let plus = coherent_amplitudes(1.0, &coeffs).unwrap();
            let minus = coherent_amplitudes(-1.0, &coeffs).unwrap();
            let a = even.inner(&plus).unwrap();
            let b = even.inner(&minus).unwrap();
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn cat_amplitudes_follow_closed_expression() {
        // Even: 2𝒩_+ N zⁿ/fact_n on even n.
        let coeffs = adaptive_ladder(AlgebraKind::GeneralizedSu11, &FIG, 1.3).unwrap();
        let norms = cat_normalization(1.3, &coeffs).unwrap();
        let even = cat_state(1.3, Parity::Even, &coeffs).unwrap();
        for n in (0..=coeffs.cutoff()).step_by(2) {
            let expect = 2.0 * norms.n_plus * norms.n_coherent * 1.3f64.powi(n as i32)
                / coeffs.log_norm_factorial()[n].exp();
            assert!((even.amplitudes()[n].re - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn odd_cat_at_origin_fails() {
        let coeffs = ladder(AlgebraKind::Gha, FIG, 4);
        assert!(matches!(cat_state(0.0, Parity::Odd, &coeffs), Err(Error::OddCatAtOrigin)));
        let even = cat_state(0.0, Parity::Even, &coeffs).unwrap();
        assert_eq!(even.amplitudes()[0].re, 1.0);
    }

    /// Direct scan of the Poisson tail for the harmonic GHA case.
    fn poisson_cutoff_oracle(z: f64, tol: f64) -> usize {
        let x = z * z;
        let terms: Vec<f64> = (0..400)
            .map(|n| (n as f64 * x.ln() - (1..=n).map(|k| (k as f64).ln()).sum::<f64>()).exp())
            .collect();
        (1..400)
            .find(|&c| terms[c..].iter().sum::<f64>() < tol * terms[..c].iter().sum::<f64>())
            .unwrap()
    }

    #[test]
    fn cutoff_selection() {
        let h = DeformationParams::harmonic(0.2);
        assert_eq!(select_cutoff(AlgebraKind::Gha, &h, 0.0, 1e-14, 512).unwrap(), 1);
        let small = select_cutoff(AlgebraKind::Gha, &h, 1.0, 1e-14, 512).unwrap();
        assert_eq!(small, poisson_cutoff_oracle(1.0, 1e-14));
        assert_eq!(small, 17);
        let large = select_cutoff(AlgebraKind::Gha, &h, 3.0, 1e-14, 512).unwrap();
        assert_eq!(large, poisson_cutoff_oracle(3.0, 1e-14));
        assert!(large > small);
        assert!(select_cutoff(AlgebraKind::Gha, &h, 1.0, 1e-3, 512).is_err());
        assert!(matches!(
            select_cutoff(AlgebraKind::Gha, &h, 20.0, 1e-14, 64),
            Err(Error::Truncation { .. })
        ));
    }
}
