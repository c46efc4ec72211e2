use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("site index {index} out of range for {len} sites")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("singular matrix: {0}")]
    SingularMatrix(String),

    #[error("off-diagonals are not constant and equal")]
    NotSymmetricOffdiag,

    #[error("matrix does not have the absorbing-boundary shape: {0}")]
    ShapeMismatch(String),

    #[error("dense path is capped at N = {cap}, requested N = {n}")]
    DensePathCapExceeded { n: usize, cap: usize },

    #[error("invalid absorbing-boundary coefficients: {0}")]
    InvalidAbcCoefficients(String),

    #[error("interpolation energies must differ (alpha1 = alpha2 = {0})")]
    DegenerateEnergies(f64),

    #[error("angular frequency must be positive, got {0}")]
    NonpositiveOmega(f64),

    #[error("region contains no usable sites")]
    EmptyRegion,

    #[error("run has not reached steady state (relative change {change:.3e} per drive period)")]
    NotSettled { change: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("at step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
