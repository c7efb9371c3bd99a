use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] noble_means::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2: bad input, 3: size or convergence limits, 1: I/O.
    pub fn exit_code(&self) -> i32 {
        use noble_means::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(E::SizeLimit { .. } | E::NotConverged { .. }) => 3,
            CliError::Core(_) => 2,
            CliError::Io { .. } => 1,
        }
    }
}
