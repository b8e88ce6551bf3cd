use thiserror::Error;

use crate::dsl::{CheckError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised while loading traces or evaluating properties.
///
/// Times and values are reported as `f64` regardless of the scalar type the
/// evaluation ran with.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },

    #[error("malformed CSV at line {line}: {message}")]
    MalformedCsv { line: u64, message: String },

    #[error("timestamps are not strictly increasing at line {line}")]
    NonMonotoneTime { line: u64 },

    #[error("non-finite value in column `{column}` at line {line}")]
    NonFiniteValue { line: u64, column: String },

    #[error("need at least {needed} samples, found {found}")]
    TooFewSamples { needed: usize, found: usize },

    #[error("time {t} is outside the domain of signal `{signal}`")]
    OutOfDomain { signal: String, t: f64 },

    #[error("unknown signal `{0}`")]
    UnknownSignal(String),

    #[error("derivative column `{0}` is missing from the trace")]
    MissingDerivativeColumn(String),

    #[error("division by zero at t = {t}")]
    DivisionByZero { t: f64 },

    #[error("need at least {needed} extrema, found {found}")]
    TooFewExtrema { needed: usize, found: usize },

    #[error("boolean projections are defined over different grids ({left} vs {right} samples)")]
    GridMismatch { left: usize, right: usize },

    #[error("{0} cannot be used as a cause, effect or trigger")]
    NotProjectable(String),

    #[error("interval [{lo}, {hi}] must satisfy 0 <= lo < hi")]
    PunctualInterval { lo: f64, hi: f64 },

    #[error("invalid threshold: {0}")]
    InvalidThreshold(String),

    #[error("trace has {samples} samples; the reference evaluator accepts at most {limit}")]
    TraceTooLarge { samples: usize, limit: usize },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Check(#[from] CheckError),
}
