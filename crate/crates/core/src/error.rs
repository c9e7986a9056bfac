use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("enumeration budget exceeded: {what} needs {needed} items (budget {budget})")]
    Budget {
        what: String,
        needed: u128,
        budget: u64,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("cache error: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
