//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("limit must be at least 1")]
    ZeroLimit,

    #[error("t = {t} is below the Riemann-Siegel range; use the Euler-Maclaurin evaluator for t < 10")]
    RiemannSiegelRange { t: f64 },

    #[error("divisor table holds d(n) for n <= {limit}, but the sum needs n <= {needed}")]
    DivisorTableTooSmall { limit: u64, needed: u64 },

    #[error("Re(B) = {re_b} must be positive for the Gaussian integral")]
    NonPositiveGaussian { re_b: f64 },

    #[error("summand n = {n} violates 2*pi*n < T = {t}; the log factor is undefined there")]
    LogArgumentOutOfRange { n: u64, t: f64 },

    #[error("quadrature did not reach the target accuracy: achieved error estimate {achieved:e}, target {target:e}")]
    QuadratureAccuracy { achieved: f64, target: f64 },

    #[error("G = {g} outside the validity window [{lo}, {hi}] for this formula")]
    SmoothingWindow { g: f64, lo: f64, hi: f64 },

    #[error("spectral data reaches kappa = {available}, but the truncation rule needs kappa <= {required}")]
    SpectralCoverage { required: f64, available: f64 },

    #[error("spectral file {path}, line {line}: {message}")]
    SpectralParse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("counting work estimate {estimate:e} exceeds the guard {bound:e}")]
    WorkBound { estimate: f64, bound: f64 },

    #[error("parameter {name} = {value} is invalid: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
