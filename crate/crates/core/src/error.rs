use thiserror::Error;

/// Errors raised by the workbench.
///
/// Refusals carry a human-readable reason; verdict-shaped outcomes
/// (refuted / unknown) are not errors and travel as [`crate::CheckVerdict`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("usage: {0}")]
    Usage(String),

    #[error("element `{element}` does not belong to the {backend} monoid")]
    ForeignElement { element: String, backend: String },

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid multiplication table: {0}")]
    InvalidTable(String),

    #[error("step budget of {budget} exhausted after reaching `{reached}`")]
    BudgetExhausted { budget: usize, reached: String },

    #[error("refused: {0}")]
    Refused(String),

    /// Refused because a search ran out of budget, not because the answer
    /// is negative.
    #[error("refused: unknown within bound: {0}")]
    Undetermined(String),

    #[error("invalid derivation: {0}")]
    InvalidTrace(String),

    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
}

impl Error {
    pub fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    pub fn refused(reason: impl Into<String>) -> Self {
        Error::Refused(reason.into())
    }

    pub fn usage(reason: impl Into<String>) -> Self {
        Error::Usage(reason.into())
    }

    /// Shifts a parse error located in a sub-string onto an absolute line.
    pub fn at_line(self, line: usize) -> Self {
        match self {
            Error::Parse {
                line: 0,
                column,
                message,
            } => Error::Parse {
                line,
                column,
                message,
            },
            Error::Usage(message) => Error::Parse {
                line,
                column: 1,
                message,
            },
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
