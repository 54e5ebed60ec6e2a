//! Exit-code discipline: 0 success, 2 validation failure, 3 numerical
//! failure.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Bad inputs: unreadable files, malformed headers, too many bad rows,
    /// inconsistent configuration.
    Validation(anyhow::Error),
    /// The inputs parsed but the computation failed: solver blow-up, rank
    /// deficiency, unidentified variance.
    Numerical(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::Numerical(_) => "numerical",
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(e) | CliError::Numerical(e) => write!(f, "{e:#}"),
        }
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = Result<T, CliError>;

/// Anything io/parse-shaped is a validation failure.
pub fn validation<E: Into<anyhow::Error>>(e: E) -> CliError {
    CliError::Validation(e.into())
}

pub fn numerical<E: Into<anyhow::Error>>(e: E) -> CliError {
    CliError::Numerical(e.into())
}

pub trait Contextual<T> {
    fn invalid(self, what: &str) -> CliResult<T>;
}

impl<T, E: Into<anyhow::Error>> Contextual<T> for Result<T, E> {
    fn invalid(self, what: &str) -> CliResult<T> {
        self.map_err(|e| CliError::Validation(e.into().context(what.to_string())))
    }
}
