use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("coordinates {i} and {j} coincide (x_i = {xi}, x_j = {xj})")]
    CoincidentCoordinates { i: usize, j: usize, xi: f64, xj: f64 },

    #[error("outside the domain: {0}")]
    Domain(String),

    #[error("step failure at t = {time}: step size fell below {min_dt:e}")]
    StepFailure { time: f64, min_dt: f64 },

    #[error("eigensolver did not converge (dimension {dim})")]
    EigensolveFailure { dim: usize },

    #[error("degenerate knot vector: all {0} knots coincide")]
    DegenerateKnots(usize),

    #[error("derivative order {order} exceeds N - 2 = {max}")]
    OrderTooHigh { order: usize, max: usize },

    #[error("determinant condition estimate {condition:e} exceeds {limit:e}")]
    NumericalInstability { condition: f64, limit: f64 },

    #[error("N = {n}, K = {k} is outside the exact density envelope (N <= 30, K <= 6)")]
    OutsideStabilityEnvelope { n: usize, k: usize },

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("series for J_{nu}({x}) did not converge")]
    ConvergenceFailure { nu: f64, x: f64 },

    #[error("empty sample")]
    EmptySample,

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
