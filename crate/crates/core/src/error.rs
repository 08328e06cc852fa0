//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("polynomial coefficients exceeded the overflow bound ({0} bits)")]
    CoefficientOverflow(u64),

    #[error("operator matrix has no free parameters (system is not underdetermined)")]
    NoFreeParameters,

    #[error("kernel parameters invalid: {0}")]
    InvalidKernel(String),

    #[error(
        "derivative order ({i}, {j}) exceeds the smoothness of the kernel (max order {max})"
    )]
    SmoothnessExceeded { i: usize, j: usize, max: usize },

    #[error("covariance factorization failed even with jitter up to {max_jitter:e}")]
    FactorizationFailed { max_jitter: f64 },

    #[error("invalid bounds: lower > upper at index {index} ({lower} > {upper})")]
    InvalidBounds {
        index: usize,
        lower: f64,
        upper: f64,
    },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("hyperparameter search aborted after {0} consecutive non-finite objective values")]
    TrainingDiverged(usize),

    #[error("initial point is not strictly inside the box at index {index} (value {value})")]
    InfeasibleInit { index: usize, value: f64 },

    #[error(
        "collision cap exceeded while sampling ({collisions} collisions in one step, cap {cap}); \
         the truncated region is likely degenerate"
    )]
    CollisionCapExceeded { collisions: usize, cap: usize },

    #[error("invalid control problem: {0}")]
    InvalidProblem(String),

    #[error("control loop failed at step {step} (t = {time}): {source}")]
    ControlStep {
        step: usize,
        time: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_step(self, step: usize, time: f64) -> Error {
        Error::ControlStep {
            step,
            time,
            source: Box::new(self),
        }
    }
}
