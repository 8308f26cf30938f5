use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A bounded search ran out of budget before reaching a conclusion.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    /// A decider's stated precondition does not hold for the given inputs.
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::ResourceLimit(_))
    }
}
