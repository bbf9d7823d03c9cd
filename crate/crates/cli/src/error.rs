//! CLI error type and exit codes.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Config { path: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] graphpde::Error),

    #[error("precondition not met: {0}")]
    Precondition(String),

    #[error("hypothesis check failed: {0}")]
    Hypothesis(String),

    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// 2 for unmet preconditions and failed hypothesis checks, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        use graphpde::Error as E;
        match self {
            CliError::Precondition(_) | CliError::Hypothesis(_) => 2,
            CliError::Core(
                E::InvalidParameter(_)
                | E::InvalidGraph(_)
                | E::Coercivity { .. }
                | E::BracketInverted { .. }
                | E::EmptyBoundary
                | E::NotInterior(_)
                | E::NotBoundary(_),
            ) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
