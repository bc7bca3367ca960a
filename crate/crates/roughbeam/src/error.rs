use thiserror::Error;

/// Library error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Wave mode is evanescent (critical-or-beyond incidence); excluded by the model.
    #[error("evanescent mode: {0}")]
    EvanescentMode(String),

    /// A parameter violates a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Requested covariance is not positive semidefinite on the synthesis grid.
    #[error("covariance not positive semidefinite: {0}")]
    CovarianceNotPsd(String),

    /// Beam energy beyond the declared threshold falls outside the sampled interface.
    #[error("beam footprint not covered: {0}")]
    FootprintNotCovered(String),

    /// A resampling window reaches outside the simulated grid.
    #[error("window exceeds simulated grid: {0}")]
    WindowOutOfBounds(String),

    /// Grid too coarse for the requested fields.
    #[error("grid resolution insufficient: {0}")]
    GridResolution(String),

    /// A computed sine left [-1, 1]: no propagating scattered direction.
    #[error("computed sine {value} out of range: no propagating angle")]
    SineOutOfRange { value: f64 },

    /// Configuration rejected at load/validation time.
    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed binary/CSV payload.
    #[error("format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
