use thiserror::Error;

/// Errors produced by the optimizers, the analysis routines and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    /// The objective refused an evaluation because its budget is spent.
    #[error("evaluation budget of {budget} exhausted")]
    BudgetExhausted { budget: u64 },

    #[error("no individual at population position {0}")]
    UnknownIndex(usize),

    #[error("selection support is empty: {0}")]
    EmptySupport(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Results on disk were produced by a different plan.
    #[error("result mismatch: {0}")]
    ResultMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::ResultMismatch(_) => 3,
            _ => 1,
        }
    }
}

impl From<toml::de::Error> for Error {
    fn from(err: toml::de::Error) -> Self {
        Error::Config(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
