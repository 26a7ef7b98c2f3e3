use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("contract violated: {0}")]
    Contract(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("IO error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Infeasible(_) => 2,
            Error::Budget(_) => 3,
            Error::Input(_) | Error::Io(_) | Error::Json(_) | Error::Capacity(_) => 4,
            Error::Contract(_) | Error::Internal(_) => 1,
        }
    }
}
