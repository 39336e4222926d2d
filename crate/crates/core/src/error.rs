use thiserror::Error;

/// Errors produced anywhere in the slide-statistics pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("distance profile needs at least 2 entries, got {0}")]
    TooFewPoints(usize),

    #[error("non-positive or non-finite distance {value} at index {index} (duplicate points upstream?)")]
    NonPositiveDistance { index: usize, value: f64 },

    #[error("duplicate point at index {index}")]
    DuplicatePoint { index: usize },

    #[error("d^t overflows at t = {t}; rescale the profile first")]
    Overflow { t: f64 },

    #[error("finite-difference oracle unstable: Richardson corrections {previous:e} -> {last:e}")]
    OracleUnstable { previous: f64, last: f64 },

    #[error("step density integrates to {mass}, expected 1")]
    NotNormalized { mass: f64 },

    #[error("invalid step density: {0}")]
    BadDensity(String),

    #[error("quadrature did not converge: estimate {estimate}, last change {change:e}")]
    QuadratureNoConvergence { estimate: f64, change: f64 },

    #[error("rho2 = {0} is not negative; tangible dimension undefined")]
    NonNegativeRho2(f64),

    #[error("bad source spec: {0}")]
    BadSpec(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("non-positive price {value} at line {line}")]
    NonPositivePrice { line: usize, value: f64 },

    #[error("series of length {len} too short for depth {depth} with {windows} windows")]
    SeriesTooShort {
        len: usize,
        depth: usize,
        windows: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
