use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: &'static str,
    },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is not positive definite (min eigenvalue {min_eig:e}, max eigenvalue {max_eig:e})")]
    NotPositiveDefinite { min_eig: f64, max_eig: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("empty step schedule")]
    EmptySchedule,

    #[error("step schedule must be positive and strictly decreasing")]
    InvalidSchedule,

    #[error("difference quotient underflows at h = {h:e}")]
    Underflow { h: f64 },

    #[error("unknown system '{0}'")]
    UnknownSystem(String),

    #[error("invalid parameter for '{system}': {reason}")]
    InvalidParameter { system: String, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("evaluation failed at sample {index} (x = {point:?}): {source}")]
    SampleFailure {
        index: usize,
        point: Vec<f64>,
        source: Box<Error>,
    },

    #[error("trajectory blew up at t = {time}")]
    BlowUp { time: f64 },

    #[error("Newton iteration stagnated at |f| = {residual:e}")]
    NewtonStagnation { residual: f64 },

    #[error("grid too coarse: dt * max|mu| = {density} > {limit}")]
    GridTooCoarse { density: f64, limit: f64 },

    #[error("trajectories are not comparable: {0}")]
    MismatchedTrajectories(String),

    #[error("V(0) = 0 but V({time}) = {value:e}; integration error")]
    SpuriousVelocity { time: f64, value: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
