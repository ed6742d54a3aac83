use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown experiment {0}")]
    UnknownExperiment(String),
    #[error("{0}")]
    Usage(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: std::io::Error },
    #[error("plot: {0}")]
    Plot(String),
}

impl CliError {
    /// 2 for bad invocations, 3 for numerical failures, 4 for output errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::UnknownExperiment(_) | Self::Usage(_) => 2,
            Self::Numerical(_) => 3,
            Self::Output { .. } | Self::Plot(_) => 4,
        }
    }
}

impl From<bgrecon_core::Error> for CliError {
    fn from(e: bgrecon_core::Error) -> Self {
        Self::Numerical(e.to_string())
    }
}
