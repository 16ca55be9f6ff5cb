use thiserror::Error;

/// Errors shared across the library. The CLI maps these onto exit codes:
/// invalid input and I/O failures exit 2, bound violations exit 3, and
/// resource refusals (desk-bound exceeded) exit 4.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("desk bound exceeded: {0}")]
    ResourceRefusal(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("bound violation: {0}")]
    BoundViolation(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn refusal(msg: impl Into<String>) -> Self {
        Error::ResourceRefusal(msg.into())
    }

    /// Process exit code for the CLI contract.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BoundViolation(_) => 3,
            Error::ResourceRefusal(_) => 4,
            _ => 2,
        }
    }
}
