//! Deformed spectrum `ε_n = n + (a·n + e)/(n + d)` and the ladder
//! coefficients of the generalized Heisenberg algebra (GHA) and the
//! generalized su(1,1) algebra built on it.
//!
//! Both algebras share the spectrum; they differ in the squared ladder norm:
//!
//! * GHA: `N_n² = ε_{n+1} − ε_0`
//! * su(1,1): `𝒩_n² = (ε_{n+1} − ε_0)(ε_{n+1} + ε_0 − 1)`
//!
//! Factorial products `𝒩_{n−1}! = 𝒩_{n−1}⋯𝒩_0` are tabulated as logarithms.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::ln_gamma_signed;

/// Spectrum parameters with the denominator scale `c` fixed to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeformationParams {
    pub a: f64,
    pub d: f64,
    pub e: f64,
}

impl DeformationParams {
    pub fn new(a: f64, d: f64, e: f64) -> Self {
        Self { a, d, e }
    }

    /// `a = 1/2, e = d/2`: the spectrum collapses to `n + 1/2`.
    pub fn harmonic(d: f64) -> Self {
        Self::new(0.5, d, 0.5 * d)
    }

    pub fn epsilon(&self, n: usize) -> f64 {
        epsilon(n, self)
    }

    pub fn validate(&self, cutoff: usize) -> ValidationReport {
        validate_spectrum(self, cutoff)
    }

    /// `d + a − e/d + 1`, the shifted parameter shared by both closed forms.
    fn shifted(&self) -> f64 {
        self.d + self.a - self.e / self.d + 1.0
    }

    /// Roots `(α, β)` of `d·k² + (ad + d² + d + e)·k + (ad + 2de + e)`,
    /// negated. `None` when the discriminant is negative.
    pub fn su11_alpha_beta(&self) -> Option<(f64, f64)> {
        let DeformationParams { a, d, e } = *self;
        let linear = a * d + d * d + d + e;
        let constant = a * d + 2.0 * d * e + e;
        let disc = linear * linear - 4.0 * d * constant;
        if disc < 0.0 || !disc.is_finite() {
            return None;
        }
        let center = 0.5 * (a + d + 1.0 + e / d);
        let half_width = disc.sqrt() / (2.0 * d);
        Some((center - half_width, center + half_width))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgebraKind {
    #[serde(rename = "gha")]
    Gha,
    #[serde(rename = "su11")]
    GeneralizedSu11,
}

impl AlgebraKind {
    pub const ALL: [AlgebraKind; 2] = [AlgebraKind::Gha, AlgebraKind::GeneralizedSu11];

    pub fn as_str(self) -> &'static str {
        match self {
            AlgebraKind::Gha => "gha",
            AlgebraKind::GeneralizedSu11 => "su11",
        }
    }

    /// Squared ladder norm from `ε_{n+1}` and `ε_0`.
    fn squared_norm(self, eps_next: f64, eps0: f64) -> f64 {
        match self {
            AlgebraKind::Gha => eps_next - eps0,
            AlgebraKind::GeneralizedSu11 => (eps_next - eps0) * (eps_next + eps0 - 1.0),
        }
    }
}

impl fmt::Display for AlgebraKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for AlgebraKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gha" => Ok(AlgebraKind::Gha),
            "su11" | "su(1,1)" => Ok(AlgebraKind::GeneralizedSu11),
            other => Err(Error::Config(format!("unknown algebra `{other}` (expected gha|su11)"))),
        }
    }
}

/// `ε_n = n + (a·n + e)/(n + d)`.
pub fn epsilon(n: usize, params: &DeformationParams) -> f64 {
    let n = n as f64;
    n + (params.a * n + params.e) / (n + params.d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumCheck {
    /// `|a| < 1`
    DeformationBound,
    /// `d > 0`
    PositiveD,
    /// `ε_{n+1} > ε_n` for `n ≤ cutoff`
    StrictlyIncreasing,
    /// `ε_{n+1} − ε_0 > 0` for `n ≤ cutoff`
    GhaNormPositive,
    /// `(ε_{n+1} − ε_0)(ε_{n+1} + ε_0 − 1) > 0` for `n ≤ cutoff`
    Su11NormPositive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub check: SpectrumCheck,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of [`validate_spectrum`]. Failing checks are listed, not raised.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub params: DeformationParams,
    pub cutoff: usize,
    pub outcomes: Vec<CheckOutcome>,
}

impl ValidationReport {
    pub fn passes(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    /// Like [`passes`](Self::passes) but ignores the norm check of the other
    /// algebra.
    pub fn passes_for(&self, kind: AlgebraKind) -> bool {
        self.outcomes.iter().all(|o| {
            o.passed
                || matches!(
                    (kind, o.check),
                    (AlgebraKind::Gha, SpectrumCheck::Su11NormPositive)
                        | (AlgebraKind::GeneralizedSu11, SpectrumCheck::GhaNormPositive)
                )
        })
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.outcomes.iter().filter(|o| !o.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let failures: Vec<_> = self.failures().map(|o| o.detail.as_str()).collect();
        if failures.is_empty() {
            write!(f, "all spectrum checks pass up to cutoff {}", self.cutoff)
        } else {
            write!(f, "{}", failures.join("; "))
        }
    }
}

/// Checks the parameter bounds, then scans `ε_0..ε_{cutoff+1}` for strict
/// monotonicity and both algebras' squared norms for positivity.
pub fn validate_spectrum(params: &DeformationParams, cutoff: usize) -> ValidationReport {
    let mut outcomes = Vec::with_capacity(5);
    let a_ok = params.a.abs() < 1.0;
    outcomes.push(CheckOutcome {
        check: SpectrumCheck::DeformationBound,
        passed: a_ok,
        detail: if a_ok {
            format!("|a| = {} < 1", params.a.abs())
        } else {
            format!("|a| < 1 violated (a = {})", params.a)
        },
    });
    let d_ok = params.d > 0.0;
    outcomes.push(CheckOutcome {
        check: SpectrumCheck::PositiveD,
        passed: d_ok,
        detail: if d_ok {
            format!("d = {} > 0", params.d)
        } else {
            format!("d > 0 violated (d = {})", params.d)
        },
    });

    let eps: Vec<f64> = (0..=cutoff + 1).map(|n| epsilon(n, params)).collect();
    let eps0 = eps[0];
    let first_bad = |pred: &dyn Fn(usize) -> bool| (0..=cutoff).find(|&n| !pred(n));

    let scan = |check: SpectrumCheck, what: &str, bad: Option<usize>| CheckOutcome {
        check,
        passed: bad.is_none() && eps.iter().all(|x| x.is_finite()),
        detail: match bad {
            None if eps.iter().all(|x| x.is_finite()) => format!("{what} holds for n ≤ {cutoff}"),
            None => format!("{what}: non-finite spectrum value"),
            Some(n) => format!("{what} violated at n = {n}"),
        },
    };

    outcomes.push(scan(
        SpectrumCheck::StrictlyIncreasing,
        "strict monotonicity ε_{n+1} > ε_n",
        first_bad(&|n| eps[n + 1] > eps[n]),
    ));
    outcomes.push(scan(
        SpectrumCheck::GhaNormPositive,
        "GHA norm positivity",
        first_bad(&|n| AlgebraKind::Gha.squared_norm(eps[n + 1], eps0) > 0.0),
    ));
    outcomes.push(scan(
        SpectrumCheck::Su11NormPositive,
        "su(1,1) norm positivity",
        first_bad(&|n| AlgebraKind::GeneralizedSu11.squared_norm(eps[n + 1], eps0) > 0.0),
    ));

    ValidationReport {
        params: *params,
        cutoff,
        outcomes,
    }
}

/// Tabulated spectrum and log-factorials of the ladder norms up to a cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderCoefficients {
    kind: AlgebraKind,
    params: DeformationParams,
    cutoff: usize,
    eps: Vec<f64>,
    log_norm_factorial: Vec<f64>,
}

impl LadderCoefficients {
    /// Validates the spectrum for `kind` and fills the log-factorial table by
    /// `ln(fact_{n+1}) = ln(fact_n) + ln(norm_n)`.
    pub fn build(kind: AlgebraKind, params: DeformationParams, cutoff: usize) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::Config("ladder cutoff must be at least 1".into()));
        }
        let report = validate_spectrum(&params, cutoff);
        if !report.passes_for(kind) {
            return Err(Error::InvalidSpectrum(report));
        }
        let eps: Vec<f64> = (0..=cutoff + 1).map(|n| epsilon(n, &params)).collect();
        let mut coeffs = Self {
            kind,
            params,
            cutoff,
            eps,
            log_norm_factorial: Vec::with_capacity(cutoff + 1),
        };
        coeffs.log_norm_factorial.push(0.0);
        for n in 0..cutoff {
            let ln_norm = coeffs.ladder_norm(n)?.ln();
            let prev = coeffs.log_norm_factorial[n];
            coeffs.log_norm_factorial.push(prev + ln_norm);
        }
        Ok(coeffs)
    }

    /// Same coefficients restricted to a smaller cutoff.
    pub fn truncated(&self, cutoff: usize) -> Self {
        let cutoff = cutoff.clamp(1, self.cutoff);
        Self {
            kind: self.kind,
            params: self.params,
            cutoff,
            eps: self.eps[..cutoff + 2].to_vec(),
            log_norm_factorial: self.log_norm_factorial[..cutoff + 1].to_vec(),
        }
    }

    pub fn kind(&self) -> AlgebraKind {
        self.kind
    }

    pub fn params(&self) -> &DeformationParams {
        &self.params
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// `ε_0..=ε_{cutoff+1}`.
    pub fn eps(&self) -> &[f64] {
        &self.eps
    }

    /// Entry `n` is `ln(norm_{n−1}!)`, with entry 0 equal to zero.
    pub fn log_norm_factorial(&self) -> &[f64] {
        &self.log_norm_factorial
    }

    pub fn squared_norm(&self, n: usize) -> Result<f64> {
        if n > self.cutoff {
            return Err(Error::OutOfRange {
                index: n,
                cutoff: self.cutoff,
            });
        }
        Ok(self.kind.squared_norm(self.eps[n + 1], self.eps[0]))
    }

    /// `N_n` (GHA) or `𝒩_n` (su(1,1)).
    pub fn ladder_norm(&self, n: usize) -> Result<f64> {
        let squared = self.squared_norm(n)?;
        if squared > 0.0 {
            Ok(squared.sqrt())
        } else {
            Err(Error::NonPhysicalNorm { n, squared })
        }
    }

    /// Scalar value of the Casimir operator on `|n⟩`, `1 ≤ n ≤ cutoff`.
    ///
    /// GHA: `N_{n−1}² − ε_n`; su(1,1): `𝒩_{n−1}² − ε_n(ε_n − 1)`.
    pub fn casimir_scalar(&self, n: usize) -> Result<f64> {
        if n == 0 || n > self.cutoff {
            return Err(Error::OutOfRange {
                index: n,
                cutoff: self.cutoff,
            });
        }
        let lowered = self.squared_norm(n - 1)?;
        let eps = self.eps[n];
        Ok(match self.kind {
            AlgebraKind::Gha => lowered - eps,
            AlgebraKind::GeneralizedSu11 => lowered - eps * (eps - 1.0),
        })
    }

    /// Expected constant value of [`casimir_scalar`](Self::casimir_scalar).
    pub fn casimir_expected(&self) -> f64 {
        let eps0 = self.eps[0];
        match self.kind {
            AlgebraKind::Gha => -eps0,
            AlgebraKind::GeneralizedSu11 => eps0 * (1.0 - eps0),
        }
    }
}

/// Closed Γ-function form of `norm_{n−1}!`, evaluated in log space.
///
/// su(1,1):
/// `[Γ(d)² d(ad+2de+e) n! Γ(n+s) Γ(α+n) Γ(β+n) / (Γ(α+1) Γ(β+1) Γ(s) Γ(1+d+n)²)]^{1/2}`
/// with `s = d + a − e/d + 1`.
///
/// GHA: `[n! Γ(n+s) Γ(d+1) / (Γ(s) Γ(n+d+1))]^{1/2}`.
///
/// Only a cross-check for [`LadderCoefficients`]; returns
/// [`Error::ClosedFormInapplicable`] when `α, β` are complex, the prefactor
/// is non-positive, or a Γ argument hits a pole.
pub fn norm_factorial_closed_form(kind: AlgebraKind, n: usize, params: &DeformationParams) -> Result<f64> {
    log_norm_factorial_closed_form(kind, n, params).map(f64::exp)
}

/// Logarithm of [`norm_factorial_closed_form`].
pub fn log_norm_factorial_closed_form(kind: AlgebraKind, n: usize, params: &DeformationParams) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let DeformationParams { a, d, e } = *params;
    let nf = n as f64;
    let s = params.shifted();

    // Accumulates ln|Γ(x)|^power and the sign of the product.
    let mut log_sq = 0.0;
    let mut sign = 1.0;
    let mut gamma = |x: f64, power: f64| -> Result<()> {
        let (v, sg) = ln_gamma_signed(x)?;
        log_sq += power * v;
        if power.rem_euclid(2.0) != 0.0 {
            sign *= sg;
        }
        Ok(())
    };

    gamma(nf + 1.0, 1.0)?;
    gamma(nf + s, 1.0)?;
    gamma(s, -1.0)?;
    match kind {
        AlgebraKind::Gha => {
            gamma(d + 1.0, 1.0)?;
            gamma(nf + d + 1.0, -1.0)?;
        }
        AlgebraKind::GeneralizedSu11 => {
            let (alpha, beta) = params.su11_alpha_beta().ok_or_else(|| {
                Error::ClosedFormInapplicable("negative discriminant: α, β are complex".into())
            })?;
            let prefactor = d * (a * d + 2.0 * d * e + e);
            if prefactor <= 0.0 {
                return Err(Error::ClosedFormInapplicable(format!(
                    "prefactor d(ad+2de+e) = {prefactor} is not positive"
                )));
            }
            gamma(d, 2.0)?;
            gamma(alpha + nf, 1.0)?;
            gamma(beta + nf, 1.0)?;
            gamma(alpha + 1.0, -1.0)?;
            gamma(beta + 1.0, -1.0)?;
            gamma(1.0 + d + nf, -2.0)?;
            log_sq += prefactor.ln();
        }
    }
    if sign < 0.0 {
        return Err(Error::ClosedFormInapplicable(format!(
            "squared factorial is negative at n = {n}"
        )));
    }
    Ok(0.5 * log_sq)
}
