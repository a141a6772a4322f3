use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("cutoff {cutoff} too small: {reason}")]
    CutoffTooSmall { cutoff: usize, reason: String },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error(
        "phase point ({x}, {xi}) is not grid-compatible; nearest compatible point is ({nearest_x}, {nearest_xi})"
    )]
    IncompatiblePhasePoint {
        x: f64,
        xi: f64,
        nearest_x: f64,
        nearest_xi: f64,
    },

    #[error("grid domain too narrow: {0}")]
    DomainTooNarrow(String),

    #[error("eigensolver failure: {0}")]
    Eigensolver(String),

    #[error("quadrature failed to converge: achieved error bound {achieved:e}, target {target:e}")]
    QuadratureNotConverged { achieved: f64, target: f64 },

    #[error("empty quadrature sample set")]
    EmptyQuadrature,

    #[error("unsupported dimension {dim}: {reason}")]
    UnsupportedDimension { dim: usize, reason: String },

    #[error("non-finite data: {0}")]
    NonFinite(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialization(String),
}
