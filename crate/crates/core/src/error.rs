use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("partitions are not comparable in the refinement order")]
    NotComparable,

    #[error("ground sizes differ: {0} vs {1}")]
    GroundSizeMismatch(usize, usize),

    #[error("enumeration would produce {required} partitions, cap is {cap}")]
    CapExceeded { required: u128, cap: u128 },

    #[error("restricted Green matrix is numerically singular")]
    Singular,

    #[error("precision of {given} bits is below the {required} bits needed for the cumulant recursion")]
    InsufficientPrecision { given: usize, required: usize },

    #[error("moment index {j} is not below n + kappa = {limit}")]
    MomentUndefined { j: usize, limit: f64 },

    #[error("theta = {theta} outside the convergence range [0, {bound})")]
    OutOfRange { theta: f64, bound: f64 },

    #[error("quadrature did not converge (error estimate {0:e})")]
    Quadrature(f64),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
