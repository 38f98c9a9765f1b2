//! Scenario files and command implementations behind the `weakmeter` binary.

pub mod commands;
pub mod output;
pub mod scenario;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments or an invalid scenario; exit status 1.
    #[error("{0}")]
    Validation(String),

    /// A computation failed for a valid scenario; exit status 2.
    #[error("{context}: {source}")]
    Computation {
        context: String,
        #[source]
        source: weakmeter::Error,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) => 1,
            Self::Computation { .. } | Self::Io { .. } => 2,
        }
    }

    pub(crate) fn computation(context: impl Into<String>) -> impl FnOnce(weakmeter::Error) -> Self {
        let context = context.into();
        move |source| Self::Computation { context, source }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
