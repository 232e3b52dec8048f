//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Shapes of two operands do not conform. Carries both shapes so the
    /// message is actionable without a debugger.
    #[error("dimension mismatch in {op}: expected {expected}, got {got}")]
    Dimension {
        op: &'static str,
        expected: String,
        got: String,
    },

    /// An argument violated a precondition (bad range, unknown name, ...).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The CSV header is missing a required column or carries an unknown one.
    #[error("schema error: {0}")]
    Schema(String),

    /// A data row could not be parsed.
    #[error("row {row}, field '{field}': {message}")]
    Row {
        row: usize,
        field: String,
        message: String,
    },

    /// Preprocessing produced no usable rows.
    #[error("empty dataset: {0}")]
    EmptyDataset(String),

    /// A model file is malformed. `offset` is the byte position at which
    /// decoding failed.
    #[error("model format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    /// A forward cache was paired with parameters it was not produced by.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dimension(op: &'static str, expected: impl Into<String>, got: impl Into<String>) -> Self {
        Error::Dimension {
            op,
            expected: expected.into(),
            got: got.into(),
        }
    }
}
