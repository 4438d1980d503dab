//! Cross-check battery for one parameter set.
//!
//! Each check compares two independent routes to the same quantity (series
//! vs matrix, Kraus vs Lindblad, closed form vs recursion) or an analytic
//! invariant. Closed forms that do not apply to the parameters are reported
//! as inapplicable rather than failed.

use std::fmt;

use ndarray::Array2;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{log_norm_factorial_closed_form, validate_spectrum, LadderCoefficients};
use crate::channel::{apply_channel, default_lindblad_steps, integrate_lindblad, kraus_operator, DampingChannel};
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::observables::{
    fidelity, fidelity_series, mandel_q, photon_probability, photon_probability_series, von_neumann_entropy,
};
use crate::scenario::{PreparedState, ScenarioConfig};
use crate::states::{
    cat_normalization, cat_normalization_hypergeometric, coherent_amplitudes, coherent_normalization,
    normalization_hypergeometric, Parity,
};

const CASIMIR_TOL: f64 = 1e-12;
const CASIMIR_MAX_N: usize = 64;
const CLOSED_FORM_TOL: f64 = 1e-8;
const CLOSED_FORM_MAX_N: usize = 30;
const RESIDUAL_TOL: f64 = 1e-8;
const COMPLETENESS_TOL: f64 = 1e-12;
const LINDBLAD_TOL: f64 = 1e-6;
const SEMIGROUP_TOL: f64 = 1e-8;
const SERIES_TOL: f64 = 1e-8;
const VACUUM_TOL: f64 = 1e-8;
const INITIAL_TOL: f64 = 1e-9;
const MONOTONE_TOL: f64 = 1e-9;
const LONG_TIME: f64 = 50.0;
const LINDBLAD_TIMES: [f64; 2] = [1.0, 5.0];
/// Grid points whose eigenvalues are checked for positivity.
const PSD_SAMPLES: usize = 11;
/// Photon numbers compared between series and matrix when none is configured.
const DEFAULT_PHOTON_CHECKS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inapplicable,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Inapplicable => "N/A",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub status: CheckStatus,
    /// Worst observed deviation, when the check is numeric.
    pub deviation: Option<f64>,
    pub tolerance: Option<f64>,
    pub detail: String,
}

impl CheckResult {
    fn measured(name: &'static str, deviation: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        let status = if deviation <= tolerance {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        Self {
            name,
            status,
            deviation: Some(deviation),
            tolerance: Some(tolerance),
            detail: detail.into(),
        }
    }

    fn failed(name: &'static str, err: &Error) -> Self {
        Self {
            name,
            status: CheckStatus::Fail,
            deviation: None,
            tolerance: None,
            detail: err.to_string(),
        }
    }

    fn inapplicable(name: &'static str, why: impl Into<String>) -> Self {
        Self {
            name,
            status: CheckStatus::Inapplicable,
            deviation: None,
            tolerance: None,
            detail: why.into(),
        }
    }

    fn from_result(name: &'static str, tolerance: f64, outcome: Result<(f64, String)>) -> Self {
        match outcome {
            Ok((dev, detail)) => Self::measured(name, dev, tolerance, detail),
            Err(Error::ClosedFormInapplicable(why)) => Self::inapplicable(name, why),
            Err(err) => Self::failed(name, &err),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatteryReport {
    pub label: String,
    pub cutoff: Option<usize>,
    pub checks: Vec<CheckResult>,
}

impl BatteryReport {
    /// No check failed (inapplicable checks do not count against the run).
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }
}

/// Pretty-printed JSON array of reports.
pub fn reports_to_json(reports: &[BatteryReport]) -> Result<String> {
    let mut text = serde_json::to_string_pretty(reports)?;
    text.push('\n');
    Ok(text)
}

impl fmt::Display for BatteryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.cutoff {
            Some(c) => writeln!(f, "{} (cutoff {c})", self.label)?,
            None => writeln!(f, "{}", self.label)?,
        }
        for check in &self.checks {
            let mut line = format!("  {:<4} {:<28}", check.status, check.name);
            if let (Some(d), Some(t)) = (check.deviation, check.tolerance) {
                line.push_str(&format!(" {d:.3e} (tol {t:.0e})"));
            }
            if !check.detail.is_empty() {
                line.push_str("  ");
                line.push_str(&check.detail);
            }
            writeln!(f, "{}", line.trim_end())?;
        }
        write!(f, "{}", if self.passed() { "all checks passed" } else { "FAILED" })
    }
}

/// Runs every check for `config`. Errors from the physics layer become
/// failed checks; nothing here returns early except an invalid spectrum or
/// an unbuildable state, after which the remaining checks are meaningless.
pub fn run_battery(config: &ScenarioConfig) -> BatteryReport {
    let mut report = BatteryReport {
        label: config.label(),
        cutoff: None,
        checks: Vec::new(),
    };
    if let Err(err) = config.check() {
        report.checks.push(CheckResult::failed("configuration", &err));
        return report;
    }
    let cutoff = match config.resolve_cutoff() {
        Ok(c) => c,
        Err(err) => {
            report.checks.push(spectrum_check(config, CASIMIR_MAX_N));
            report.checks.push(CheckResult::failed("cutoff selection", &err));
            return report;
        }
    };
    report.cutoff = Some(cutoff);
    let spectrum = spectrum_check(config, cutoff);
    let spectrum_ok = spectrum.status == CheckStatus::Pass;
    report.checks.push(spectrum);
    if !spectrum_ok {
        return report;
    }
    let prepared = match config.prepare() {
        Ok(p) => p,
        Err(err) => {
            report.checks.push(CheckResult::failed("state preparation", &err));
            return report;
        }
    };
    let coeffs = &prepared.coeffs;
    let grid = config.time_grid();

    report.checks.push(casimir_check(config));
    report.checks.push(CheckResult::from_result(
        "closed-form factorials",
        CLOSED_FORM_TOL,
        closed_form_factorials(coeffs),
    ));
    report.checks.push(CheckResult::from_result(
        "hypergeometric N(|z|)",
        CLOSED_FORM_TOL,
        hypergeometric_coherent(config, coeffs),
    ));
    report.checks.push(if config.z == 0.0 {
        CheckResult::inapplicable("hypergeometric cat norms", "z = 0")
    } else {
        CheckResult::from_result("hypergeometric cat norms", CLOSED_FORM_TOL, hypergeometric_cat(config, coeffs))
    });
    report.checks.push(CheckResult::from_result(
        "lowering eigenstate",
        RESIDUAL_TOL,
        coherent_amplitudes(config.z, coeffs)
            .and_then(|s| s.lowering_residual(coeffs))
            .map(|r| (r, String::new())),
    ));
    report.checks.push(CheckResult::from_result(
        "Kraus completeness",
        COMPLETENESS_TOL,
        kraus_completeness(config.gamma, cutoff),
    ));
    report.checks.push(CheckResult::from_result(
        "Kraus vs Lindblad",
        LINDBLAD_TOL,
        kraus_vs_lindblad(&prepared, config.gamma),
    ));

    let evolved: Result<Vec<DensityMatrix>> = grid
        .par_iter()
        .map(|&t| apply_channel(&prepared.rho0, &DampingChannel::new(config.gamma, t)?))
        .collect();
    let evolved = match evolved {
        Ok(e) => e,
        Err(err) => {
            report.checks.push(CheckResult::failed("channel on grid", &err));
            return report;
        }
    };

    report.checks.push(CheckResult::from_result(
        "trace and Hermiticity",
        crate::density::TRACE_TOL,
        trace_and_hermiticity(&evolved),
    ));
    report.checks.push(CheckResult::from_result(
        "positivity (sampled)",
        crate::density::PSD_TOL,
        positivity(&evolved),
    ));
    report.checks.push(CheckResult::from_result(
        "semigroup",
        SEMIGROUP_TOL,
        semigroup(&prepared, config.gamma, config.t_max),
    ));
    let series_applicable = prepared.state.parity() == Parity::Even;
    if series_applicable {
        report.checks.push(CheckResult::from_result(
            "fidelity series vs matrix",
            SERIES_TOL,
            fidelity_series_vs_matrix(&prepared, config.gamma, &grid, &evolved),
        ));
        let photons: Vec<usize> = match config.photon_n {
            Some(n) => vec![n],
            None => (0..=DEFAULT_PHOTON_CHECKS.min(cutoff)).collect(),
        };
        report.checks.push(CheckResult::from_result(
            "photon series vs matrix",
            SERIES_TOL,
            photon_series_vs_matrix(&prepared, config.gamma, &grid, &evolved, &photons),
        ));
    } else {
        for name in ["fidelity series vs matrix", "photon series vs matrix"] {
            report
                .checks
                .push(CheckResult::inapplicable(name, "series forms cover the even catlike state only"));
        }
    }
    report.checks.push(CheckResult::from_result(
        "fidelity monotone",
        MONOTONE_TOL,
        fidelity_monotone(&prepared, &evolved),
    ));
    report.checks.push(CheckResult::from_result(
        "F(0) = 1, S(0) = 0",
        INITIAL_TOL,
        initial_values(&prepared),
    ));
    report.checks.push(CheckResult::from_result(
        "vacuum limit at γt = 50",
        VACUUM_TOL,
        long_time_limit(&prepared, config.gamma),
    ));
    report
}

fn spectrum_check(config: &ScenarioConfig, cutoff: usize) -> CheckResult {
    let spectrum = validate_spectrum(&config.params, cutoff);
    if spectrum.passes_for(config.algebra) {
        CheckResult {
            name: "spectrum",
            status: CheckStatus::Pass,
            deviation: None,
            tolerance: None,
            detail: String::new(),
        }
    } else {
        let detail = spectrum
            .failures()
            .map(|o| o.detail.clone())
            .collect::<Vec<_>>()
            .join("; ");
        CheckResult {
            name: "spectrum",
            status: CheckStatus::Fail,
            deviation: None,
            tolerance: None,
            detail,
        }
    }
}

/// Casimir constancy over `n ≤ 64`, independent of the state cutoff.
fn casimir_check(config: &ScenarioConfig) -> CheckResult {
    let outcome = LadderCoefficients::build(config.algebra, config.params, CASIMIR_MAX_N).and_then(|c| {
        let expected = c.casimir_expected();
        let mut worst = 0.0_f64;
        for n in 1..=CASIMIR_MAX_N {
            worst = worst.max((c.casimir_scalar(n)? - expected).abs());
        }
        Ok((worst, format!("expected {expected:.12}")))
    });
    CheckResult::from_result("Casimir constancy", CASIMIR_TOL, outcome)
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Relative deviation `|e^{Δ} − 1|` of the closed form from the recursion.
fn closed_form_factorials(coeffs: &LadderCoefficients) -> Result<(f64, String)> {
    let top = CLOSED_FORM_MAX_N.min(coeffs.cutoff());
    let mut worst = 0.0_f64;
    for n in 1..=top {
        let closed = log_norm_factorial_closed_form(coeffs.kind(), n, coeffs.params())?;
        worst = worst.max((closed - coeffs.log_norm_factorial()[n]).exp_m1().abs());
    }
    Ok((worst, format!("n ≤ {top}")))
}

fn hypergeometric_coherent(config: &ScenarioConfig, coeffs: &LadderCoefficients) -> Result<(f64, String)> {
    let closed = normalization_hypergeometric(config.algebra, config.z, &config.params)?;
    Ok((relative(closed, coherent_normalization(config.z, coeffs)), String::new()))
}

fn hypergeometric_cat(config: &ScenarioConfig, coeffs: &LadderCoefficients) -> Result<(f64, String)> {
    let (plus, minus) = cat_normalization_hypergeometric(config.algebra, config.z, &config.params)?;
    let direct = cat_normalization(config.z, coeffs)?;
    let dev_plus = relative(plus, direct.n_plus);
    // 𝒩_− loses digits to cancellation in `1 − F(−x)/F(x)` as z → 0; only
    // compare it where the ratio is well conditioned.
    let dev_minus = if config.z.abs() >= 0.5 {
        relative(minus, direct.n_minus)
    } else {
        0.0
    };
    Ok((dev_plus.max(dev_minus), String::new()))
}

fn kraus_completeness(gamma: f64, cutoff: usize) -> Result<(f64, String)> {
    let mut worst = 0.0_f64;
    for gt in LINDBLAD_TIMES {
        let channel = DampingChannel::new(gamma, gt / gamma)?;
        let mut sum = Array2::<f64>::zeros((cutoff + 1, cutoff + 1));
        for j in 0..=cutoff {
            let s = kraus_operator(j, &channel, cutoff)?;
            sum += &s.t().dot(&s);
        }
        for ((k, l), v) in sum.indexed_iter() {
            let want = if k == l { 1.0 } else { 0.0 };
            worst = worst.max((v - want).abs());
        }
    }
    Ok((worst, "γt ∈ {1, 5}".into()))
}

fn kraus_vs_lindblad(prepared: &PreparedState, gamma: f64) -> Result<(f64, String)> {
    let worst = LINDBLAD_TIMES
        .par_iter()
        .map(|&gt| {
            let t = gt / gamma;
            let kraus = prepared.evolve(&DampingChannel::new(gamma, t)?)?;
            let lindblad = integrate_lindblad(&prepared.rho0, gamma, t, default_lindblad_steps(gamma, t))?;
            kraus.max_abs_diff(&lindblad)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok((worst, "γt ∈ {1, 5}, RK4".into()))
}

fn trace_and_hermiticity(evolved: &[DensityMatrix]) -> Result<(f64, String)> {
    let worst = evolved
        .iter()
        .map(|rho| ((rho.trace() - 1.0).norm()).max(rho.hermiticity_error()))
        .fold(0.0, f64::max);
    Ok((worst, format!("{} grid points", evolved.len())))
}

/// Most negative eigenvalue (as a positive deviation) over a grid sample.
fn positivity(evolved: &[DensityMatrix]) -> Result<(f64, String)> {
    let stride = (evolved.len() / (PSD_SAMPLES - 1)).max(1);
    let sample: Vec<&DensityMatrix> = evolved.iter().step_by(stride).collect();
    let worst = sample
        .par_iter()
        .map(|rho| {
            crate::eigen::hermitian_eigenvalues(rho.entries()).map(|v| v.last().copied().unwrap_or(0.0))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0_f64, |acc, low| acc.max(-low));
    Ok((worst, format!("{} grid points", sample.len())))
}

/// `Φ_{t2} ∘ Φ_{t1} = Φ_{t1+t2}`.
fn semigroup(prepared: &PreparedState, gamma: f64, t_max: f64) -> Result<(f64, String)> {
    let (t1, t2) = (0.3 * t_max, 0.5 * t_max);
    let stepwise = apply_channel(&prepared.evolve(&DampingChannel::new(gamma, t1)?)?, &DampingChannel::new(gamma, t2)?)?;
    let direct = prepared.evolve(&DampingChannel::new(gamma, t1 + t2)?)?;
    Ok((stepwise.max_abs_diff(&direct)?, format!("t1 = {t1}, t2 = {t2}")))
}

fn fidelity_series_vs_matrix(
    prepared: &PreparedState,
    gamma: f64,
    grid: &[f64],
    evolved: &[DensityMatrix],
) -> Result<(f64, String)> {
    let z = prepared.state.z();
    let worst = grid
        .par_iter()
        .zip(evolved)
        .map(|(&t, rho)| {
            let series = fidelity_series(z, &prepared.coeffs, &DampingChannel::new(gamma, t)?)?;
            Ok((series - fidelity(rho, &prepared.rho0)?).abs())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok((worst, format!("{} grid points", grid.len())))
}

fn photon_series_vs_matrix(
    prepared: &PreparedState,
    gamma: f64,
    grid: &[f64],
    evolved: &[DensityMatrix],
    photons: &[usize],
) -> Result<(f64, String)> {
    let z = prepared.state.z();
    let worst = grid
        .par_iter()
        .zip(evolved)
        .map(|(&t, rho)| {
            let channel = DampingChannel::new(gamma, t)?;
            photons.iter().try_fold(0.0_f64, |acc, &n| {
                let series = photon_probability_series(n, z, &prepared.coeffs, &channel)?;
                Ok(acc.max((series - photon_probability(rho, n)?).abs()))
            })
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok((worst, format!("n ∈ {photons:?}")))
}

/// Largest increase of `F` between consecutive grid points.
fn fidelity_monotone(prepared: &PreparedState, evolved: &[DensityMatrix]) -> Result<(f64, String)> {
    let values = evolved
        .iter()
        .map(|rho| fidelity(rho, &prepared.rho0))
        .collect::<Result<Vec<f64>>>()?;
    let rise = values.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    Ok((rise, String::new()))
}

fn initial_values(prepared: &PreparedState) -> Result<(f64, String)> {
    let f0 = fidelity(&prepared.rho0, &prepared.rho0)?;
    let s0 = von_neumann_entropy(&prepared.rho0)?;
    Ok(((f0 - 1.0).abs().max(s0.abs()), format!("F(0) = {f0:.15}, S(0) = {s0:.3e}")))
}

/// At `γt = 50`: `ρ = |0⟩⟨0|`, `F = ⟨0|ρ₀|0⟩`, `P_0 = 1`, `Q = 0`.
fn long_time_limit(prepared: &PreparedState, gamma: f64) -> Result<(f64, String)> {
    let rho = prepared.evolve(&DampingChannel::new(gamma, LONG_TIME / gamma)?)?;
    let vacuum = DensityMatrix::vacuum(rho.cutoff());
    let f = fidelity(&rho, &prepared.rho0)?;
    let f_limit = prepared.rho0.entries()[[0, 0]].re;
    let worst = rho
        .max_abs_diff(&vacuum)?
        .max((f - f_limit).abs())
        .max((photon_probability(&rho, 0)? - 1.0).abs())
        .max(mandel_q(&rho).abs());
    Ok((worst, format!("F(∞) = ⟨0|ρ₀|0⟩ = {f_limit:.12}")))
}
