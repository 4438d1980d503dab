//! Catlike (even/odd coherent) states of a four-parameter deformed harmonic
//! oscillator under zero-temperature amplitude damping.
//!
//! The crate covers the deformed spectrum and ladder coefficients of the
//! generalized Heisenberg algebra and the generalized su(1,1) algebra
//! ([`algebra`]), nonlinear coherent and catlike states in a truncated Fock
//! basis ([`states`]), the Kraus-form damping channel with a Lindblad
//! integrator as an independent check ([`channel`]), the fidelity, photon
//! distribution, Mandel Q and von Neumann entropy ([`observables`]), and the
//! scenario and figure-preset runner used by the command-line tool
//! ([`scenario`], [`output`], [`validate`]).

pub mod algebra;
pub mod channel;
pub mod density;
pub mod eigen;
pub mod error;
pub mod observables;
pub mod output;
pub mod scenario;
pub mod special;
pub mod states;
pub mod validate;

pub use algebra::{
    epsilon, norm_factorial_closed_form, validate_spectrum, AlgebraKind, DeformationParams,
    LadderCoefficients, ValidationReport,
};
pub use channel::{apply_channel, integrate_lindblad, DampingChannel};
pub use density::DensityMatrix;
pub use error::{Error, Result};
pub use observables::Observable;
pub use output::OutputFormat;
pub use scenario::{
    run_preset, run_scenario, run_z_sweep, AmplitudeSweep, CutoffChoice, Figure, FigurePreset,
    ObservableChoice, ObservableTrace, ScenarioConfig,
};
pub use states::{cat_state, FockVector, Parity};
pub use validate::{reports_to_json, run_battery, BatteryReport, CheckStatus};
