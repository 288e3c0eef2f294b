use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Shapes, labels or dimensions do not line up.
    #[error("structural error: {0}")]
    Structural(String),

    /// Inputs are well-shaped but violate a documented precondition.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("post-selection impossible for this measurement (total branch weight {weight:e})")]
    PostSelectionImpossible { weight: f64 },

    #[error("null branch: projected norm squared {norm_sqr:e}")]
    NullBranch { norm_sqr: f64 },

    #[error("conditioning on null event (probability {probability:e})")]
    NullCondition { probability: f64 },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("ill-conditioned LP: pivot {pivot:e} at row {row}, column {column}")]
    IllConditioned { pivot: f64, row: usize, column: usize },

    #[error("separating certificate failed verification: {0}")]
    Certificate(String),

    #[error("reconstruction invalid: {0}")]
    ReconstructionInvalid(String),
}

impl Error {
    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
