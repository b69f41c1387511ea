use std::io;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Numerical {
        context: &'static str,
        #[source]
        source: sgmor_core::Error,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    /// 2 for config errors, 3 for numerical failures, 4 for I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical { .. } => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub(crate) fn csv(path: &Path, err: csv::Error) -> Self {
        let source = match err.into_kind() {
            csv::ErrorKind::Io(e) => e,
            other => io::Error::new(io::ErrorKind::InvalidData, format!("{other:?}")),
        };
        CliError::Io { path: path.to_path_buf(), source }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

pub(crate) trait Context<T> {
    fn context(self, what: &'static str) -> Result<T>;
}

impl<T> Context<T> for sgmor_core::Result<T> {
    fn context(self, what: &'static str) -> Result<T> {
        self.map_err(|source| CliError::Numerical { context: what, source })
    }
}
