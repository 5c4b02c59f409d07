use serde::Serialize;
use thiserror::Error;

/// Errors raised by state construction, witness evaluation, noise channels,
/// table analysis and fringe fitting.
#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[serde(tag = "error", content = "detail")]
pub enum Error {
    #[error("register conflict: {0}")]
    RegisterConflict(String),

    #[error("invalid subsystem: {0}")]
    InvalidSubsystem(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("stabilizer index {0} outside 1..=6")]
    InvalidIndex(usize),

    #[error("numerical inconsistency: {0}")]
    NumericalInconsistency(String),

    #[error("unsupported measurement basis: {0}")]
    UnsupportedBasis(String),

    #[error("Pauli strings anticommute; product is not Hermitian")]
    Anticommuting,

    #[error("no sign change of the witness on [0, 1]")]
    NoThreshold,

    #[error("witness is not monotone in the noise parameter")]
    NotMonotone,

    #[error("parse error at {location}: {message}")]
    ParseError { location: String, message: String },

    #[error("missing table entries: {}", .0.join(", "))]
    MissingEntries(Vec<String>),

    #[error("no counts recorded")]
    EmptyData,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("fit failed: {0}")]
    FitError(String),
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::ParseError {
            location: location.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}
