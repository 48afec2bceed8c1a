use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Caller supplied a value outside the operation's domain.
    #[error("invalid input: {0}")]
    Input(String),
    /// An argument violated a numerical contract (not Hermitian, not a density matrix, ...).
    #[error("contract violation: {0}")]
    Contract(String),
    /// Problem size exceeds what the dense/brute-force paths support.
    #[error("scale limit exceeded: {0}")]
    Scale(String),
    /// Iterative numerics failed; `best` carries the best value reached, if any.
    #[error("numerical failure: {message}")]
    Numerical { message: String, best: Option<f64> },
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical {
            message: msg.into(),
            best: None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
