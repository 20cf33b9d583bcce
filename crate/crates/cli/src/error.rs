use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("schema error at line {line}, field {field:?}: {message}")]
    Schema { line: usize, field: String, message: String },

    #[error(transparent)]
    Core(#[from] fracdiff_core::Error),

    #[error("invalid option {option}: {message}")]
    InvalidOption { option: &'static str, message: String },

    #[error("{command} does not accept a {kind} input")]
    WrongInput { command: &'static str, kind: &'static str },

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    /// Machine-readable form written to stderr.
    pub fn to_json(&self) -> Value {
        let kind = match self {
            CliError::Schema { .. } => "SchemaError",
            CliError::Core(e) => core_kind(e),
            CliError::InvalidOption { .. } => "InvalidOption",
            CliError::WrongInput { .. } => "WrongInput",
            CliError::Io { .. } => "IoError",
        };
        let mut body = json!({ "kind": kind, "message": self.to_string() });
        if let CliError::Schema { line, field, .. } = self {
            body["line"] = json!(line);
            body["field"] = json!(field);
        }
        json!({ "error": body })
    }
}

fn core_kind(e: &fracdiff_core::Error) -> &'static str {
    use fracdiff_core::Error::*;
    match e {
        SingularBasis { .. } => "SingularBasis",
        CapExceeded { .. } => "CapExceeded",
        DimensionMismatch { .. } => "DimensionMismatch",
        DuplicateTranslate { .. } => "DuplicateTranslate",
        InvalidRegion(_) => "InvalidRegion",
        NonLatticeInput(_) => "NonLatticeInput",
        NoConvergence { .. } => "NoConvergence",
        ZeroRoot => "ZeroRoot",
        BracketFailure(_) => "BracketFailure",
        ConstraintViolation(_) => "ConstraintViolation",
        NearPole { .. } => "NearPole",
        CancellationRisk(_) => "CancellationRisk",
        TranslatesOutsideBox { .. } => "TranslatesOutsideBox",
        AmbiguousDisplacements { .. } => "AmbiguousDisplacements",
        InvalidInput(_) => "InvalidInput",
    }
}
