use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state failed validation: {0}")]
    Validation(String),

    #[error("infeasible problem: {0}")]
    Infeasible(String),

    #[error("ill-conditioned system: {0}")]
    IllConditioned(String),

    #[error("tolerance check failed: {0}")]
    Tolerance(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Process exit code used by the command line: 2 for bad input,
    /// 3 for infeasible or ill-conditioned problems, 4 for internal tolerance
    /// failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_)
            | Error::Validation(_)
            | Error::Parse(_)
            | Error::Io(_)
            | Error::Json(_)
            | Error::Csv(_) => 2,
            Error::Infeasible(_) | Error::IllConditioned(_) => 3,
            Error::Tolerance(_) => 4,
        }
    }
}
