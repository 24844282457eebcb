use rlcm_core::AlgebraError;
use serde_json::{json, Value};
use thiserror::Error;

/// Anything that stops a command before it produces a verdict. Always exit code 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("invalid configuration in {path}: {message}")]
    Config { path: String, message: String },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl CliError {
    pub fn to_json(&self) -> Value {
        let body = match self {
            CliError::Io { path, .. } => json!({"kind": "io", "path": path, "message": self.to_string()}),
            CliError::Config { path, message } => json!({"kind": "config", "path": path, "message": message}),
            CliError::Usage(message) => json!({"kind": "usage", "message": message}),
            CliError::Algebra(AlgebraError::Registration { what, reason, report }) => json!({
                "kind": "registration",
                "what": what,
                "reason": reason,
                "report": report.as_ref().map(|r| r.to_json()),
            }),
            CliError::Algebra(e) => json!({"kind": "algebra", "message": e.to_string()}),
        };
        json!({ "error": body })
    }
}
