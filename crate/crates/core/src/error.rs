use thiserror::Error;

/// Failure modes shared by every numerical stage.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("series kind mismatch: {0}")]
    KindMismatch(String),

    #[error("insufficient series order: need {required}, have {available}")]
    InsufficientOrder { required: usize, available: usize },

    #[error("{what} did not converge after {iterations} iterations (last residual {residual:e})")]
    NonConvergence {
        what: String,
        iterations: usize,
        residual: f64,
    },

    #[error("I - B B* is not positive definite at order {order}")]
    NotPositiveDefinite { order: usize },

    #[error("geometry: {0}")]
    Geometry(String),

    #[error("singular point: {0}")]
    Singular(String),

    #[error("analyticity: {0}")]
    Analyticity(String),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::NotPositiveDefinite { .. }
                | Error::Singular(_)
                | Error::Analyticity(_)
                | Error::Geometry(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
