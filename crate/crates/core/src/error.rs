use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("divisor must be nonzero")]
    ZeroDivisor,

    #[error("value {value} outside representable range [{lo}, {hi})")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("index ({index}) out of range for size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("{num_vars} variables exceeds the exhaustive enumeration cap of {cap}; use the annealing sampler instead")]
    TooLarge { num_vars: usize, cap: usize },

    #[error("matrix is singular or numerically singular (sigma_min/sigma_max = {ratio:e})")]
    Singular { ratio: f64 },

    #[error("hardware graph too small: {0}")]
    InsufficientHardware(String),

    #[error("no physical coupler joins the chains of logical vertices {0} and {1}")]
    NoPhysicalEdge(usize, usize),

    #[error("broken chains: all {reads} reads had at least one broken chain")]
    BrokenChains { reads: usize },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}
