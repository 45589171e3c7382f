//! Library side of the `kstar` command-line tool.

pub mod commands;
pub mod manifold;
pub mod parse;

use kstar_core::{CoeffError, GeometryError, StarError};
use serde_json::json;

pub use commands::{run, Cli};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Parse(#[from] parse::ParseError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error(transparent)]
    Star(#[from] StarError),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Input(_) => "input",
            CliError::Parse(_) => "parse",
            CliError::Geometry(_) => "geometry",
            CliError::Coeff(_) => "coefficients",
            CliError::Star(_) => "star",
            CliError::Io(_) => "io",
        }
    }

    pub fn to_json(&self) -> String {
        json!({ "error": self.kind(), "message": self.to_string() }).to_string()
    }
}

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
