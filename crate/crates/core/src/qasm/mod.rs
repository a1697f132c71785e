//! OpenQASM 2.0 ingestion and emission.
//!
//! Registers are flattened in declaration order, user `gate` definitions are
//! inlined, and `opaque` gates are carried through by name. Classical
//! conditionals and OpenQASM 3 constructs are rejected with a positioned
//! diagnostic.

mod emit;
mod lexer;
mod parser;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::circuit::Circuit;

pub use emit::emit_qasm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseDiagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub severity: Severity,
}

impl ParseDiagnostic {
    pub fn error(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseDiagnostic {
            line,
            column,
            message: message.into(),
            severity: Severity::Error,
        }
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {sev}: {}", self.line, self.column, self.message)
    }
}

/// Parse failure; holds at least one error diagnostic.
#[derive(Debug, Clone, Error)]
pub struct ParseError {
    pub diagnostics: Vec<ParseDiagnostic>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.diagnostics.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Error)]
#[error("cannot emit invalid circuit: {violation}")]
pub struct EmitError {
    pub violation: String,
}

pub fn parse_qasm(text: &str) -> Result<Circuit, ParseError> {
    parser::parse(text).map_err(|d| ParseError { diagnostics: vec![d] })
}
