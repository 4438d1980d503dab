//! Scenario configuration, time-grid evaluation and the figure presets.
//!
//! Every grid point is evaluated independently from `t` (the Kraus map is
//! not stepped), so points run in parallel and are collected in grid order.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::algebra::{AlgebraKind, DeformationParams, LadderCoefficients};
use crate::channel::{apply_channel, DampingChannel};
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::observables::{
    fidelity, fidelity_series, mandel_q, mean_photon_number, photon_probability,
    photon_probability_series, von_neumann_entropy, Observable,
};
use crate::states::{cat_state, select_cutoff, FockVector, Parity, DEFAULT_CUTOFF_CAP, DEFAULT_TAIL_TOL};

pub const DEFAULT_GAMMA: f64 = 1.0;
pub const DEFAULT_STEPS: usize = 201;
pub const DEFAULT_T_MAX: f64 = 5.0;
pub const DEFAULT_PHOTON_T_MAX: f64 = 8.0;

/// Observable names as used on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObservableChoice {
    Fidelity,
    Photons,
    Mandel,
    Entropy,
    MeanN,
}

impl ObservableChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            ObservableChoice::Fidelity => "fidelity",
            ObservableChoice::Photons => "photons",
            ObservableChoice::Mandel => "mandel",
            ObservableChoice::Entropy => "entropy",
            ObservableChoice::MeanN => "mean-n",
        }
    }

    pub fn default_t_max(self) -> f64 {
        match self {
            ObservableChoice::Photons => DEFAULT_PHOTON_T_MAX,
            _ => DEFAULT_T_MAX,
        }
    }
}

impl FromStr for ObservableChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "fidelity" => ObservableChoice::Fidelity,
            "photons" => ObservableChoice::Photons,
            "mandel" => ObservableChoice::Mandel,
            "entropy" => ObservableChoice::Entropy,
            "mean-n" => ObservableChoice::MeanN,
            other => {
                return Err(Error::Config(format!(
                    "unknown observable `{other}` (expected fidelity|photons|mandel|entropy|mean-n)"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CutoffChoice {
    #[default]
    Auto,
    Fixed(usize),
}

impl FromStr for CutoffChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(CutoffChoice::Auto);
        }
        s.parse::<usize>()
            .ok()
            .filter(|n| *n >= 1)
            .map(CutoffChoice::Fixed)
            .ok_or_else(|| Error::Config(format!("cutoff must be `auto` or a positive integer, got `{s}`")))
    }
}

impl fmt::Display for CutoffChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CutoffChoice::Auto => f.write_str("auto"),
            CutoffChoice::Fixed(n) => write!(f, "{n}"),
        }
    }
}

/// One curve: state preparation, damping rate, time grid and observable.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub algebra: AlgebraKind,
    pub params: DeformationParams,
    pub z: f64,
    pub gamma: f64,
    pub parity: Parity,
    pub t_min: f64,
    pub t_max: f64,
    pub steps: usize,
    pub cutoff: CutoffChoice,
    pub observable: ObservableChoice,
    pub photon_n: Option<usize>,
}

impl ScenarioConfig {
    /// Even cat, `γ = 1`, automatic cutoff and the default grid for the
    /// observable.
    pub fn new(algebra: AlgebraKind, params: DeformationParams, z: f64, observable: ObservableChoice) -> Self {
        Self {
            algebra,
            params,
            z,
            gamma: DEFAULT_GAMMA,
            parity: Parity::Even,
            t_min: 0.0,
            t_max: observable.default_t_max(),
            steps: DEFAULT_STEPS,
            cutoff: CutoffChoice::Auto,
            observable,
            photon_n: None,
        }
    }

    pub fn with_photon_n(mut self, n: usize) -> Self {
        self.photon_n = Some(n);
        self
    }

    pub fn resolved_observable(&self) -> Result<Observable> {
        Ok(match self.observable {
            ObservableChoice::Fidelity => Observable::Fidelity,
            ObservableChoice::Photons => Observable::PhotonProbability(
                self.photon_n
                    .ok_or_else(|| Error::Config("observable `photons` needs a photon index n".into()))?,
            ),
            ObservableChoice::Mandel => Observable::MandelQ,
            ObservableChoice::Entropy => Observable::VonNeumannEntropy,
            ObservableChoice::MeanN => Observable::MeanPhotonNumber,
        })
    }

    /// Checks grid, rate and amplitude; the spectrum is checked when the
    /// ladder is built.
    pub fn check(&self) -> Result<()> {
        if !(self.t_min.is_finite() && self.t_max.is_finite() && self.t_min >= 0.0 && self.t_min < self.t_max) {
            return Err(Error::Config(format!(
                "time grid needs 0 <= tmin < tmax, got [{}, {}]",
                self.t_min, self.t_max
            )));
        }
        if self.steps < 2 {
            return Err(Error::Config(format!("steps must be at least 2, got {}", self.steps)));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::Config(format!("gamma must be positive, got {}", self.gamma)));
        }
        if !self.z.is_finite() {
            return Err(Error::Config(format!("z must be finite, got {}", self.z)));
        }
        self.resolved_observable()?;
        Ok(())
    }

    pub fn label(&self) -> String {
        let p = &self.params;
        let mut label = format!("{}_a{}_d{}_e{}_z{}", self.algebra, p.a, p.d, p.e, self.z);
        if self.parity == Parity::Odd {
            label.push_str("_odd");
        }
        if let (ObservableChoice::Photons, Some(n)) = (self.observable, self.photon_n) {
            label.push_str(&format!("_n{n}"));
        }
        label
    }

    /// `steps` points from `t_min` to `t_max`, both included.
    pub fn time_grid(&self) -> Vec<f64> {
        linear_grid(self.t_min, self.t_max, self.steps)
    }

    pub fn resolve_cutoff(&self) -> Result<usize> {
        match self.cutoff {
            CutoffChoice::Fixed(n) => Ok(n),
            CutoffChoice::Auto => select_cutoff(self.algebra, &self.params, self.z, DEFAULT_TAIL_TOL, DEFAULT_CUTOFF_CAP),
        }
    }

    /// Builds the ladder and the initial state.
    pub fn prepare(&self) -> Result<PreparedState> {
        let cutoff = self.resolve_cutoff()?;
        let coeffs = LadderCoefficients::build(self.algebra, self.params, cutoff)?;
        let state = cat_state(self.z, self.parity, &coeffs)?;
        let rho0 = DensityMatrix::from_pure(&state);
        Ok(PreparedState { coeffs, state, rho0 })
    }
}

pub(crate) fn linear_grid(start: f64, end: f64, points: usize) -> Vec<f64> {
    let span = end - start;
    let last = (points - 1) as f64;
    (0..points)
        .map(|i| if i + 1 == points { end } else { start + span * (i as f64 / last) })
        .collect()
}

/// Ladder, initial state and `ρ(0)` of a scenario.
#[derive(Debug, Clone)]
pub struct PreparedState {
    pub coeffs: LadderCoefficients,
    pub state: FockVector,
    pub rho0: DensityMatrix,
}

impl PreparedState {
    pub fn evolve(&self, channel: &DampingChannel) -> Result<DensityMatrix> {
        apply_channel(&self.rho0, channel)
    }

    /// Observable of the Kraus-evolved state.
    pub fn evaluate(&self, observable: Observable, rho_t: &DensityMatrix) -> Result<f64> {
        match observable {
            Observable::Fidelity => fidelity(rho_t, &self.rho0),
            Observable::PhotonProbability(n) => photon_probability(rho_t, n),
            Observable::MandelQ => Ok(mandel_q(rho_t)),
            Observable::VonNeumannEntropy => von_neumann_entropy(rho_t),
            Observable::MeanPhotonNumber => Ok(mean_photon_number(rho_t)),
        }
    }

    /// Series route, available for fidelity and photon probabilities of the
    /// even catlike state.
    pub fn evaluate_series(&self, observable: Observable, channel: &DampingChannel) -> Option<Result<f64>> {
        if self.state.parity() != Parity::Even {
            return None;
        }
        let z = self.state.z();
        match observable {
            Observable::Fidelity => Some(fidelity_series(z, &self.coeffs, channel)),
            Observable::PhotonProbability(n) => Some(photon_probability_series(n, z, &self.coeffs, channel)),
            _ => None,
        }
    }
}

/// What the first column of a trace measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Abscissa {
    /// Time `t`.
    T,
    /// Amplitude `|z|` at fixed time.
    Z,
}

impl Abscissa {
    pub fn as_str(self) -> &'static str {
        match self {
            Abscissa::T => "t",
            Abscissa::Z => "z",
        }
    }
}

/// Resolved parameters of one curve, including the cutoff actually used.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioRecord {
    pub label: String,
    pub algebra: AlgebraKind,
    pub a: f64,
    pub d: f64,
    pub e: f64,
    /// `None` for amplitude sweeps.
    pub z: Option<f64>,
    pub gamma: f64,
    pub parity: Parity,
    /// Largest cutoff used by the curve.
    pub cutoff: usize,
    pub observable: ObservableChoice,
    pub photon_n: Option<usize>,
    pub t_min: f64,
    pub t_max: f64,
    pub steps: usize,
}

/// Observable values along a grid, with the scenario that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableTrace {
    pub observable: Observable,
    pub abscissa: Abscissa,
    pub points: Vec<f64>,
    pub values: Vec<f64>,
    pub scenario: ScenarioRecord,
}

impl ObservableTrace {
    /// Grid strictly increasing, values finite, probabilities in
    /// `[0, 1 + 1e-9]`, entropy `≥ −1e-9`.
    pub fn check_invariants(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidState(format!("trace {}: {msg}", self.scenario.label)));
        if self.points.len() != self.values.len() {
            return fail("grid and values differ in length".into());
        }
        if self.points.windows(2).any(|w| w[1] <= w[0]) {
            return fail("grid is not strictly increasing".into());
        }
        for (p, v) in self.points.iter().zip(&self.values) {
            if !v.is_finite() {
                return fail(format!("non-finite value at {p}"));
            }
            let bounded = match self.observable {
                Observable::Fidelity | Observable::PhotonProbability(_) => (-1e-9..=1.0 + 1e-9).contains(v),
                Observable::VonNeumannEntropy => *v >= -1e-9,
                Observable::MandelQ | Observable::MeanPhotonNumber => true,
            };
            if !bounded {
                return fail(format!("value {v} out of range at {p}"));
            }
        }
        Ok(())
    }
}

fn record(config: &ScenarioConfig, cutoff: usize, z: Option<f64>) -> ScenarioRecord {
    ScenarioRecord {
        label: config.label(),
        algebra: config.algebra,
        a: config.params.a,
        d: config.params.d,
        e: config.params.e,
        z,
        gamma: config.gamma,
        parity: config.parity,
        cutoff,
        observable: config.observable,
        photon_n: config.photon_n,
        t_min: config.t_min,
        t_max: config.t_max,
        steps: config.steps,
    }
}

/// Evaluates the configured observable on the time grid through the Kraus
/// route.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ObservableTrace> {
    let context = || format!("scenario {}", config.label());
    config.check().map_err(|e| e.in_scenario(context()))?;
    let observable = config.resolved_observable()?;
    let prepared = config.prepare().map_err(|e| e.in_scenario(context()))?;
    if let Observable::PhotonProbability(n) = observable {
        if n > prepared.coeffs.cutoff() {
            return Err(Error::OutOfRange {
                index: n,
                cutoff: prepared.coeffs.cutoff(),
            }
            .in_scenario(context()));
        }
    }
    let points = config.time_grid();
    let values = points
        .par_iter()
        .map(|&t| {
            let channel = DampingChannel::new(config.gamma, t)?;
            let rho_t = prepared.evolve(&channel)?;
            prepared.evaluate(observable, &rho_t)
        })
        .collect::<Result<Vec<f64>>>()
        .map_err(|e| e.in_scenario(context()))?;
    Ok(ObservableTrace {
        observable,
        abscissa: Abscissa::T,
        points,
        values,
        scenario: record(config, prepared.coeffs.cutoff(), Some(config.z)),
    })
}

/// Amplitude sweep at a fixed time `t`. The time-grid fields of `base` are
/// ignored; its `z` is replaced by each sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeSweep {
    pub t: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub points: usize,
}

impl AmplitudeSweep {
    pub fn grid(&self) -> Vec<f64> {
        linear_grid(self.z_min, self.z_max, self.points)
    }

    fn check(&self) -> Result<()> {
        if !(self.z_min.is_finite() && self.z_max.is_finite() && self.z_min < self.z_max) {
            return Err(Error::Config(format!(
                "z sweep needs zmin < zmax, got [{}, {}]",
                self.z_min, self.z_max
            )));
        }
        if self.points < 2 {
            return Err(Error::Config("z sweep needs at least 2 points".into()));
        }
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return Err(Error::Config(format!("sweep time must be non-negative, got {}", self.t)));
        }
        Ok(())
    }
}

pub fn run_z_sweep(base: &ScenarioConfig, sweep: &AmplitudeSweep) -> Result<ObservableTrace> {
    let context = || format!("z sweep {}", base.label());
    sweep.check().map_err(|e| e.in_scenario(context()))?;
    let observable = base.resolved_observable()?;
    let channel = DampingChannel::new(base.gamma, sweep.t)?;
    let points = sweep.grid();
    let results = points
        .par_iter()
        .map(|&z| {
            let config = ScenarioConfig { z, ..base.clone() };
            let prepared = config.prepare()?;
            let rho_t = prepared.evolve(&channel)?;
            Ok((prepared.evaluate(observable, &rho_t)?, prepared.coeffs.cutoff()))
        })
        .collect::<Result<Vec<(f64, usize)>>>()
        .map_err(|e| e.in_scenario(context()))?;
    let cutoff = results.iter().map(|r| r.1).max().unwrap_or(0);
    let mut scenario = record(base, cutoff, None);
    let p = &base.params;
    scenario.label = format!("{}_a{}_d{}_e{}_t{}", base.algebra, p.a, p.d, p.e, sweep.t);
    scenario.t_min = sweep.t;
    scenario.t_max = sweep.t;
    scenario.steps = 1;
    Ok(ObservableTrace {
        observable,
        abscissa: Abscissa::Z,
        points,
        values: results.into_iter().map(|r| r.0).collect(),
        scenario,
    })
}

/// Curves sharing one abscissa, written to one output file.
#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub preset: Option<FigurePreset>,
    pub traces: Vec<ObservableTrace>,
}

impl Figure {
    pub fn single(trace: ObservableTrace) -> Self {
        Self {
            preset: None,
            traces: vec![trace],
        }
    }
}

/// Panels of the four published figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigurePreset {
    Fig1a,
    Fig1b,
    Fig1c,
    Fig1d,
    Fig2a,
    Fig2b,
    Fig2c,
    Fig2d,
    Fig2e,
    Fig2f,
    Fig3a,
    Fig3b,
    Fig4a,
    Fig4b,
}

/// Expansion of a preset into curves.
#[derive(Debug, Clone, PartialEq)]
pub enum PresetPlan {
    Time(Vec<ScenarioConfig>),
    Amplitude { sweep: AmplitudeSweep, curves: Vec<ScenarioConfig> },
}

impl PresetPlan {
    pub fn curves(&self) -> &[ScenarioConfig] {
        match self {
            PresetPlan::Time(c) => c,
            PresetPlan::Amplitude { curves, .. } => curves,
        }
    }
}

impl FigurePreset {
    pub const ALL: [FigurePreset; 14] = [
        FigurePreset::Fig1a,
        FigurePreset::Fig1b,
        FigurePreset::Fig1c,
        FigurePreset::Fig1d,
        FigurePreset::Fig2a,
        FigurePreset::Fig2b,
        FigurePreset::Fig2c,
        FigurePreset::Fig2d,
        FigurePreset::Fig2e,
        FigurePreset::Fig2f,
        FigurePreset::Fig3a,
        FigurePreset::Fig3b,
        FigurePreset::Fig4a,
        FigurePreset::Fig4b,
    ];

    pub fn id(self) -> &'static str {
        match self {
            FigurePreset::Fig1a => "fig1a",
            FigurePreset::Fig1b => "fig1b",
            FigurePreset::Fig1c => "fig1c",
            FigurePreset::Fig1d => "fig1d",
            FigurePreset::Fig2a => "fig2a",
            FigurePreset::Fig2b => "fig2b",
            FigurePreset::Fig2c => "fig2c",
            FigurePreset::Fig2d => "fig2d",
            FigurePreset::Fig2e => "fig2e",
            FigurePreset::Fig2f => "fig2f",
            FigurePreset::Fig3a => "fig3a",
            FigurePreset::Fig3b => "fig3b",
            FigurePreset::Fig4a => "fig4a",
            FigurePreset::Fig4b => "fig4b",
        }
    }

    /// Curves in the order of the panel's legend.
    pub fn plan(self) -> PresetPlan {
        use AlgebraKind::{GeneralizedSu11 as Su11, Gha};
        use ObservableChoice::*;
        let p = DeformationParams::new;
        let cfg = |kind, params, z, obs| ScenarioConfig::new(kind, params, z, obs);
        let both = |a_values: &[f64], d: f64, e: f64, z: f64, obs| -> Vec<ScenarioConfig> {
            a_values
                .iter()
                .flat_map(|&a| [cfg(Gha, p(a, d, e), z, obs), cfg(Su11, p(a, d, e), z, obs)])
                .collect()
        };
        let one = |kind, a_values: &[f64], z: f64, obs| -> Vec<ScenarioConfig> {
            a_values.iter().map(|&a| cfg(kind, p(a, 0.2, 0.1), z, obs)).collect()
        };
        let photons = |kind, a: f64, z: f64, n: usize| cfg(kind, p(a, 0.2, 0.1), z, Photons).with_photon_n(n);
        match self {
            FigurePreset::Fig1a => PresetPlan::Time(both(&[0.5, 0.7], 0.2, 0.1, 1.0, Fidelity)),
            FigurePreset::Fig1b => PresetPlan::Time(both(&[0.2, 0.5], 0.2, 0.1, 1.0, Fidelity)),
            FigurePreset::Fig1c => PresetPlan::Time(
                [(0.4, 0.2), (0.2, 0.1)]
                    .iter()
                    .flat_map(|&(d, e)| both(&[0.7], d, e, 1.0, Fidelity))
                    .collect(),
            ),
            FigurePreset::Fig1d => PresetPlan::Amplitude {
                sweep: AmplitudeSweep {
                    t: 1.0,
                    z_min: 0.01,
                    z_max: 4.0,
                    points: 200,
                },
                curves: both(&[0.5, 0.7], 0.2, 0.1, 1.0, Fidelity),
            },
            FigurePreset::Fig2a | FigurePreset::Fig2b => {
                let kind = if self == FigurePreset::Fig2a { Gha } else { Su11 };
                PresetPlan::Time([0.2, 0.5, 0.9].iter().map(|&a| photons(kind, a, 3.0, 4)).collect())
            }
            FigurePreset::Fig2c | FigurePreset::Fig2d => {
                let kind = if self == FigurePreset::Fig2c { Gha } else { Su11 };
                PresetPlan::Time([2, 3].iter().map(|&n| photons(kind, 0.7, 3.0, n)).collect())
            }
            FigurePreset::Fig2e | FigurePreset::Fig2f => {
                let kind = if self == FigurePreset::Fig2e { Gha } else { Su11 };
                PresetPlan::Time([1.0, 2.0].iter().map(|&z| photons(kind, 0.9, z, 2)).collect())
            }
            FigurePreset::Fig3a => PresetPlan::Time(one(Gha, &[0.5, 0.9, 0.2], 1.0, Mandel)),
            FigurePreset::Fig3b => PresetPlan::Time(one(Su11, &[0.5, 0.9, 0.2], 1.0, Mandel)),
            FigurePreset::Fig4a => PresetPlan::Time(
                [1.5, 1.0]
                    .iter()
                    .map(|&z| cfg(Su11, p(0.9, 0.2, 0.1), z, Entropy))
                    .collect(),
            ),
            FigurePreset::Fig4b => PresetPlan::Time(one(Su11, &[0.7, 0.9], 1.0, Entropy)),
        }
    }
}

impl fmt::Display for FigurePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for FigurePreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigurePreset::ALL
            .into_iter()
            .find(|p| p.id() == s)
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

impl Serialize for FigurePreset {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.id())
    }
}

/// Runs every curve of a preset.
pub fn run_preset(preset: FigurePreset) -> Result<Figure> {
    run_plan(&preset.plan()).map(|traces| Figure {
        preset: Some(preset),
        traces,
    })
}

pub fn run_plan(plan: &PresetPlan) -> Result<Vec<ObservableTrace>> {
    match plan {
        PresetPlan::Time(curves) => curves.par_iter().map(run_scenario).collect(),
        PresetPlan::Amplitude { sweep, curves } => curves.par_iter().map(|c| run_z_sweep(c, sweep)).collect(),
    }
}
