use thiserror::Error;

use crate::report::Report;

#[derive(Debug, Error)]
pub enum AlgebraError {
    /// Operands come from different registered families (or do not fit the one in use).
    #[error("family mismatch: expected {expected}, got {found}")]
    FamilyMismatch { expected: String, found: String },

    #[error("invalid element: {0}")]
    InvalidElement(String),

    /// A semigroup or system failed its registration-time checks.
    #[error("registration failed for {what}: {reason}")]
    Registration {
        what: String,
        reason: String,
        report: Option<Box<Report>>,
    },

    #[error("transversal of {0} is infinite; request a finite prefix instead")]
    TruncationRequired(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, AlgebraError>;

pub(crate) fn mismatch(expected: impl Into<String>, found: impl Into<String>) -> AlgebraError {
    AlgebraError::FamilyMismatch {
        expected: expected.into(),
        found: found.into(),
    }
}
