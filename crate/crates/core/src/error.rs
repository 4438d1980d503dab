use thiserror::Error;

use crate::algebra::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid deformation parameters: {0}")]
    InvalidSpectrum(ValidationReport),

    #[error("non-positive squared ladder norm {squared:e} at n = {n}")]
    NonPhysicalNorm { n: usize, squared: f64 },

    #[error("closed form inapplicable: {0}")]
    ClosedFormInapplicable(String),

    #[error("index {index} exceeds cutoff {cutoff}")]
    OutOfRange { index: usize, cutoff: usize },

    #[error("truncation tail {tail:e} not below tolerance {tol:e} at cutoff {cutoff}")]
    Truncation { cutoff: usize, tail: f64, tol: f64 },

    #[error("odd catlike state is undefined at z = 0")]
    OddCatAtOrigin,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("trace deviates from one by {deviation:e}; increase the cutoff")]
    TraceDeviation { deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("{context}: {source}")]
    Scenario {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn in_scenario(self, context: impl Into<String>) -> Self {
        Error::Scenario {
            context: context.into(),
            source: Box::new(self),
        }
    }
}
