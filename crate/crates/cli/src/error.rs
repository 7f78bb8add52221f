use std::fmt;

use serde::Serialize;

/// Machine-readable failure record written to stderr on a nonzero exit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliError {
    pub stage: &'static str,
    pub level: Option<usize>,
    pub index: Option<usize>,
    pub message: String,
}

impl CliError {
    pub fn new(stage: &'static str, message: impl Into<String>) -> Self {
        CliError { stage, level: None, index: None, message: message.into() }
    }

    pub fn at_index(mut self, index: usize) -> Self {
        self.index = Some(index);
        self
    }

    /// Lifts a library error, keeping the level and index it carries.
    pub fn core(stage: &'static str, e: geowave::Error) -> Self {
        CliError { stage, level: e.level(), index: e.index(), message: e.root().to_string() }
    }

    pub fn io(stage: &'static str, path: &std::path::Path, e: std::io::Error) -> Self {
        CliError::new(stage, format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.stage, self.message)
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = Result<T, CliError>;
