use std::fmt;

use serde_json::{json, Value};

/// Everything that ends a run early, with the exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable or malformed input.
    Usage(String),
    /// The input parsed but fails the axioms or a stated precondition. The report, when there
    /// is one, is still printed.
    Validation { message: String, report: Option<Value> },
    /// The library contradicted itself, or goldens differ from fresh reports.
    Consistency(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Validation { .. } => 1,
            CliError::Consistency(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Validation { .. } => "validation",
            CliError::Consistency(_) => "consistency",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Consistency(m) => m,
            CliError::Validation { message, .. } => message,
        }
    }

    /// The machine-readable form written to stderr.
    pub fn to_json(&self) -> Value {
        json!({
            "schema": crate::SCHEMA,
            "error": { "kind": self.kind(), "message": self.message(), "exit_code": self.exit_code() },
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind(), self.message())
    }
}

pub fn io_error(what: &str, e: std::io::Error) -> CliError {
    CliError::Usage(format!("{what}: {e}"))
}
