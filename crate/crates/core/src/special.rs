//! Gamma-function and hypergeometric-series helpers used by the closed-form
//! cross-checks.

use crate::error::{Error, Result};

/// `ln|Γ(x)|` together with the sign of `Γ(x)`.
///
/// Fails at the poles `x ∈ {0, -1, -2, ...}`.
pub fn ln_gamma_signed(x: f64) -> Result<(f64, f64)> {
    if !x.is_finite() {
        return Err(Error::NonFinite("gamma argument"));
    }
    if x <= 0.0 && x == x.floor() {
        return Err(Error::ClosedFormInapplicable(format!(
            "gamma pole at argument {x}"
        )));
    }
    let (value, sign) = libm::lgamma_r(x);
    Ok((value, if sign < 0 { -1.0 } else { 1.0 }))
}

/// Numerically stable `ln(Σ exp(x_i))`, skipping `-inf` entries.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

const PFQ_MAX_TERMS: usize = 100_000;

/// Generalized hypergeometric series `pFq(upper; lower; x)` summed term by
/// term until the additive term drops below `1e-16` relative to the partial
/// sum (once the term ratio is contracting).
pub fn hypergeometric_pfq(upper: &[f64], lower: &[f64], x: f64) -> Result<f64> {
    if let Some(b) = lower.iter().find(|b| **b <= 0.0 && **b == b.floor()) {
        return Err(Error::ClosedFormInapplicable(format!(
            "lower hypergeometric parameter {b} is a non-positive integer"
        )));
    }
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    for k in 0..PFQ_MAX_TERMS {
        let kf = k as f64;
        let num: f64 = upper.iter().map(|a| a + kf).product();
        let den: f64 = lower.iter().map(|b| b + kf).product();
        let ratio = num / den * x / (kf + 1.0);
        term *= ratio;
        sum += term;
        if !sum.is_finite() {
            return Err(Error::NonFinite("hypergeometric series"));
        }
        if term == 0.0 || (ratio.abs() < 1.0 && term.abs() <= 1e-16 * sum.abs()) {
            return Ok(sum);
        }
    }
    Err(Error::ClosedFormInapplicable(format!(
        "hypergeometric series did not converge in {PFQ_MAX_TERMS} terms"
    )))
}
