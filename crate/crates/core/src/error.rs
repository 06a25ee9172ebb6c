//! Crate-wide error type.

use std::path::PathBuf;

/// Errors raised by the simulation and inference layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Operand shapes are incompatible for the requested operation.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A Hermitian input was required but the check `M = M†` failed.
    #[error("matrix is not Hermitian (max |M - M†| entry = {max_dev:.3e})")]
    NonHermitianInput { max_dev: f64 },

    /// A vector meant to be un-stacked into a square matrix has a length
    /// that is not a perfect square.
    #[error("vector of length {len} cannot be unstacked into a square matrix")]
    NonSquareLength { len: usize },

    /// Depolarizing strength outside `[0, 1]`.
    #[error("depolarizing strength {0} outside [0, 1]")]
    StrengthOutOfRange(f64),

    /// A piecewise generator schedule with no segments.
    #[error("piecewise generator schedule is empty")]
    EmptySchedule,

    /// A channel file failed to parse; positions are 1-based.
    #[error("parse error at line {line}, column {column}: {message}")]
    ParseError {
        line: usize,
        column: usize,
        message: String,
    },

    /// A channel file declared a structural flag its matrix does not satisfy.
    #[error("channel flag validation failed: {0}")]
    ChannelFlagViolation(String),

    /// An experiment design violated its invariants.
    #[error("invalid experiment design: {0}")]
    InvalidDesign(String),

    /// The observed datum has (numerically) zero likelihood under every
    /// particle, so the Bayes update is undefined.
    #[error("zero evidence: datum has vanishing likelihood under every particle")]
    ZeroEvidence,

    /// The particle cloud has no two distinct locations to draw from.
    #[error("degenerate cloud: no two distinct particle locations found")]
    DegenerateCloud,

    /// Posterior covariance stayed singular after regularization.
    #[error("singular covariance (condition number above 1e12 after regularization)")]
    SingularCovariance,

    /// No strictly positive losses remain in the requested fit range.
    #[error("no positive losses in fit range; cannot fit a log-linear decay")]
    NonPositiveLoss,

    /// Invalid run/sweep/channel configuration.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Filesystem failure, tagged with the offending path.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    /// JSON (de)serialization failure.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable tag for error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "dimension-mismatch",
            Error::NonHermitianInput { .. } => "non-hermitian-input",
            Error::NonSquareLength { .. } => "non-square-length",
            Error::StrengthOutOfRange(_) => "strength-out-of-range",
            Error::EmptySchedule => "empty-schedule",
            Error::ParseError { .. } => "parse-error",
            Error::ChannelFlagViolation(_) => "channel-flag-violation",
            Error::InvalidDesign(_) => "invalid-design",
            Error::ZeroEvidence => "zero-evidence",
            Error::DegenerateCloud => "degenerate-cloud",
            Error::SingularCovariance => "singular-covariance",
            Error::NonPositiveLoss => "non-positive-loss",
            Error::InvalidConfig(_) => "invalid-config",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
        }
    }

    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
