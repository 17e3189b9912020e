use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("catalog error: {0}")]
    Catalog(String),

    #[error("unknown Witt symbol: {0}")]
    UnknownWitt(String),

    #[error("precision {0} bits is below the minimum of 64")]
    Precision(u32),

    #[error("monte carlo error: {0}")]
    MonteCarlo(String),
}

impl Error {
    pub(crate) fn geometry(msg: impl Into<String>) -> Self {
        Error::Geometry(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
