use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A structural precondition of the operation does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// The requested size exceeds what the operation is willing to enumerate.
    #[error("capacity exceeded: {what} is limited to {limit}, got {got}")]
    Capacity {
        what: &'static str,
        limit: usize,
        got: usize,
    },

    /// The matrix handed to `collapse` lacks the column block property.
    #[error("column block property fails in block ({block_row}, {block_col}) for block size {d}")]
    ColumnBlock {
        block_row: usize,
        block_col: usize,
        d: usize,
    },

    #[error("parse error: {0}")]
    Parse(String),

    /// The QR iteration failed to converge.
    #[error("eigensolver did not converge for a matrix of order {0}")]
    NoConvergence(usize),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn capacity(what: &'static str, limit: usize, got: usize) -> Self {
        Error::Capacity { what, limit, got }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
