//! Module file format and error type shared by the `obpers` binary.

pub mod modfile;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("bad arguments: {0}")]
    Args(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::Args(_) => 4,
        }
    }
}
