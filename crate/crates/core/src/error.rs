use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("truncation inadequate: {0}")]
    TruncationInadequate(String),

    #[error("state specification is empty or has vanishing weights")]
    EmptySpec,

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("boundary violation: edge density {density:e} exceeds {limit:e}")]
    BoundaryViolation { density: f64, limit: f64 },

    #[error("integrator failure: {0}")]
    IntegratorFailure(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("malformed grid field data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures caused by numerical resolution (truncation, grid size,
    /// integrator accuracy) rather than by invalid input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::TruncationInadequate(_)
                | Error::BoundaryViolation { .. }
                | Error::IntegratorFailure(_)
                | Error::NotNormalized(_)
        )
    }
}
