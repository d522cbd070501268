use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("declaration error: {0}")]
    Declaration(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("arity error: {0}")]
    Arity(String),
    #[error("alignment error: {0}")]
    Alignment(String),
    #[error("operator not applicable: {0}")]
    NotApplicable(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("undefined: {0}")]
    Undefined(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn not_applicable(msg: impl Into<String>) -> Self {
        Error::NotApplicable(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
