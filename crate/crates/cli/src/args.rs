//! Flag definitions and the flat TOML config file that backs them.

use std::fs;
use std::path::{Path, PathBuf};

use catlike_core::scenario::{DEFAULT_GAMMA, DEFAULT_STEPS};
use catlike_core::{
    AlgebraKind, AmplitudeSweep, CutoffChoice, DeformationParams, Error, ObservableChoice, OutputFormat,
    Parity, Result, ScenarioConfig,
};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

pub const DEFAULT_SWEEP_T: f64 = 1.0;
pub const DEFAULT_SWEEP_Z_MIN: f64 = 0.01;
pub const DEFAULT_SWEEP_Z_MAX: f64 = 4.0;
pub const DEFAULT_SWEEP_POINTS: usize = 200;

#[derive(Debug, Parser)]
#[command(name = "catlike", version, about = "Decoherence of deformed-oscillator catlike states under amplitude damping")]
pub struct Cli {
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one observable over a time grid.
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Reproduce a figure panel (fig1a..fig4b, or `all` with --out DIR).
    Preset {
        id: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the cross-check battery; both algebras unless --algebra is given.
    Validate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate one observable against |z| at a fixed time.
    SweepZ {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Evaluation time.
        #[arg(long = "t")]
        t: Option<f64>,
        #[arg(long)]
        zmin: Option<f64>,
        #[arg(long)]
        zmax: Option<f64>,
        /// Number of amplitudes on the sweep grid.
        #[arg(long)]
        points: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args, Default)]
pub struct ScenarioArgs {
    /// Flat TOML file with the same keys as the flags; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub algebra: Option<AlgebraKind>,
    #[arg(long = "a", allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long = "d", allow_hyphen_values = true)]
    pub d: Option<f64>,
    #[arg(long = "e", allow_hyphen_values = true)]
    pub e: Option<f64>,
    /// Real coherent amplitude (default 1).
    #[arg(long = "z", allow_hyphen_values = true)]
    pub z: Option<f64>,
    /// Damping rate (default 1).
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub tmin: Option<f64>,
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Number of time points, both ends included (default 201).
    #[arg(long)]
    pub steps: Option<usize>,
    /// `auto` or a fixed Fock cutoff.
    #[arg(long)]
    pub cutoff: Option<CutoffChoice>,
    /// fidelity | photons | mandel | entropy | mean-n
    #[arg(long)]
    pub observable: Option<ObservableChoice>,
    /// Photon number for `--observable photons`.
    #[arg(long = "n")]
    pub n: Option<usize>,
    /// even | odd catlike state (default even).
    #[arg(long)]
    pub parity: Option<ParityArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParityArg {
    Even,
    Odd,
}

impl From<ParityArg> for Parity {
    fn from(p: ParityArg) -> Self {
        match p {
            ParityArg::Even => Parity::Even,
            ParityArg::Odd => Parity::Odd,
        }
    }
}

#[derive(Debug, Args, Default)]
pub struct OutputArgs {
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv | json (default csv).
    #[arg(long)]
    pub format: Option<OutputFormat>,
}

/// Keys accepted in a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub algebra: Option<AlgebraKind>,
    pub a: Option<f64>,
    pub d: Option<f64>,
    pub e: Option<f64>,
    pub z: Option<f64>,
    pub gamma: Option<f64>,
    pub tmin: Option<f64>,
    pub tmax: Option<f64>,
    pub steps: Option<usize>,
    pub cutoff: Option<CutoffValue>,
    pub observable: Option<String>,
    pub n: Option<usize>,
    pub parity: Option<ParityArg>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub t: Option<f64>,
    pub zmin: Option<f64>,
    pub zmax: Option<f64>,
    pub points: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum CutoffValue {
    Fixed(usize),
    Named(String),
}

impl CutoffValue {
    fn resolve(&self) -> Result<CutoffChoice> {
        match self {
            CutoffValue::Fixed(n) => n.to_string().parse(),
            CutoffValue::Named(s) => s.parse(),
        }
    }
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("config {}: {e}", path.display())))
    }
}

fn missing(key: &str) -> Error {
    Error::Config(format!("missing `--{key}` (flag or config key)"))
}

/// Flags merged over the optional config file.
pub struct Resolved {
    pub algebra: Option<AlgebraKind>,
    pub config: ScenarioConfig,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub file: FileConfig,
}

/// Builds the scenario; `default_algebra` is used when neither the flags nor
/// the file name one.
pub fn resolve(args: &ScenarioArgs, output: &OutputArgs, default_algebra: AlgebraKind) -> Result<Resolved> {
    let file = match &args.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let algebra = args.algebra.or(file.algebra);
    let a = args.a.or(file.a).ok_or_else(|| missing("a"))?;
    let d = args.d.or(file.d).ok_or_else(|| missing("d"))?;
    let e = args.e.or(file.e).ok_or_else(|| missing("e"))?;
    let observable = match (args.observable, &file.observable) {
        (Some(o), _) => o,
        (None, Some(s)) => s.parse()?,
        (None, None) => ObservableChoice::Fidelity,
    };
    let cutoff = match (args.cutoff, &file.cutoff) {
        (Some(c), _) => c,
        (None, Some(v)) => v.resolve()?,
        (None, None) => CutoffChoice::Auto,
    };
    let format = match (output.format, &file.format) {
        (Some(f), _) => f,
        (None, Some(s)) => s.parse()?,
        (None, None) => OutputFormat::Csv,
    };
    let config = ScenarioConfig {
        algebra: algebra.unwrap_or(default_algebra),
        params: DeformationParams::new(a, d, e),
        z: args.z.or(file.z).unwrap_or(1.0),
        gamma: args.gamma.or(file.gamma).unwrap_or(DEFAULT_GAMMA),
        parity: args.parity.or(file.parity).map(Parity::from).unwrap_or(Parity::Even),
        t_min: args.tmin.or(file.tmin).unwrap_or(0.0),
        t_max: args.tmax.or(file.tmax).unwrap_or(observable.default_t_max()),
        steps: args.steps.or(file.steps).unwrap_or(DEFAULT_STEPS),
        cutoff,
        observable,
        photon_n: args.n.or(file.n),
    };
    Ok(Resolved {
        algebra,
        config,
        out: output.out.clone().or_else(|| file.out.clone()),
        format,
        file,
    })
}

pub fn resolve_sweep(
    file: &FileConfig,
    t: Option<f64>,
    zmin: Option<f64>,
    zmax: Option<f64>,
    points: Option<usize>,
) -> AmplitudeSweep {
    AmplitudeSweep {
        t: t.or(file.t).unwrap_or(DEFAULT_SWEEP_T),
        z_min: zmin.or(file.zmin).unwrap_or(DEFAULT_SWEEP_Z_MIN),
        z_max: zmax.or(file.zmax).unwrap_or(DEFAULT_SWEEP_Z_MAX),
        points: points.or(file.points).unwrap_or(DEFAULT_SWEEP_POINTS),
    }
}
