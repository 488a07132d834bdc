use std::io::Write as _;

use clap::ValueEnum;
use opm_fixpoint::{Error, ExprError};
use serde::Serialize;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_NEGATIVE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

/// A finished command: its exit code and both renderings of its report.
pub struct Output {
    pub code: u8,
    pub text: String,
    pub json: String,
}

impl Output {
    pub fn new(code: u8, text: String, report: &impl Serialize) -> Self {
        Self {
            code,
            text,
            json: serde_json::to_string_pretty(report).expect("reports serialize"),
        }
    }

    pub fn print(&self, format: Format) {
        let mut out = std::io::stdout().lock();
        let body = match format {
            Format::Text => &self.text,
            Format::Json => &self.json,
        };
        let _ = writeln!(out, "{}", body.trim_end());
    }
}

#[derive(Debug, Serialize)]
pub struct CliError {
    #[serde(skip)]
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
}

#[derive(Serialize)]
struct ErrorDoc<'a> {
    error: &'a CliError,
    exit_code: u8,
}

impl CliError {
    pub fn usage(kind: &'static str, message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            kind,
            message: message.into(),
        }
    }

    pub fn negative(kind: &'static str, message: impl Into<String>) -> Self {
        Self {
            code: EXIT_NEGATIVE,
            kind,
            message: message.into(),
        }
    }

    /// Malformed input is a usage error; failures that only show up while
    /// evaluating the map are domain-level.
    pub fn from_core(e: &Error) -> Self {
        let (code, kind) = match e {
            Error::EmptySpace => (EXIT_USAGE, "empty_space"),
            Error::DimensionMismatch { .. } => (EXIT_USAGE, "dimension_mismatch"),
            Error::UnknownLabel(_) => (EXIT_USAGE, "unknown_label"),
            Error::BackendMismatch(_) => (EXIT_USAGE, "backend_mismatch"),
            Error::VectorLength { .. } => (EXIT_USAGE, "vector_length"),
            Error::InvalidSpace(_) => (EXIT_USAGE, "invalid_space"),
            Error::InvalidGrid(_) => (EXIT_USAGE, "invalid_grid"),
            Error::InvalidParameter(_) => (EXIT_USAGE, "invalid_parameter"),
            Error::Schema(_) => (EXIT_USAGE, "schema"),
            Error::Expr(ExprError::DivisionByZero | ExprError::ArgumentLength { .. }) => {
                (EXIT_NEGATIVE, "evaluation")
            }
            Error::Expr(_) => (EXIT_USAGE, "expression"),
            Error::OutOfDomain { .. } => (EXIT_NEGATIVE, "out_of_domain"),
            Error::IncompleteMap(_) => (EXIT_NEGATIVE, "incomplete_map"),
            Error::StartConditionUnmet(_) => (EXIT_NEGATIVE, "start_condition_unmet"),
            Error::TraceTooShort(_) => (EXIT_NEGATIVE, "trace_too_short"),
            Error::GenerationFailed(_) => (EXIT_NEGATIVE, "generation_failed"),
        };
        Self {
            code,
            kind,
            message: e.to_string(),
        }
    }

    pub fn print(&self, format: Format) {
        match format {
            Format::Text => eprintln!("error: {}", self.message),
            Format::Json => {
                let doc = ErrorDoc {
                    error: self,
                    exit_code: self.code,
                };
                println!(
                    "{}",
                    serde_json::to_string_pretty(&doc).expect("errors serialize")
                );
            }
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::from_core(&e)
    }
}
