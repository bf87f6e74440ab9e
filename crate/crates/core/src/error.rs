use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration {0:#b} is not in the basis")]
    NotFound(u64),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("singular point: {0}")]
    Singular(String),

    #[error("fit failed: {0}")]
    FitFailure(String),

    #[error("step size too coarse: {0}")]
    StepSize(String),

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
