use critline::{Error, ErrorClass};
use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Core(#[from] Error),
    #[error("{0}")]
    Io(String),
    /// The command ran but at least one check failed.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn parse(msg: impl Into<String>) -> Self {
        CliError::Parse(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Io(_) => 5,
            CliError::Failed(_) => 4,
            CliError::Core(e) => match e.class() {
                ErrorClass::Constraint => 3,
                ErrorClass::Numerical => 4,
                ErrorClass::Resource => 5,
                ErrorClass::CostGuard => 6,
            },
        }
    }
}
