use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("numerical failure: {0}")]
    Numerical(deh_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 usage/config, 3 numerical, 4 I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

impl From<deh_core::Error> for CliError {
    /// Parameter-level rejections are configuration errors; everything else
    /// comes from the numerics.
    fn from(e: deh_core::Error) -> Self {
        use deh_core::Error as E;
        match e {
            E::InvalidParameter { .. }
            | E::Unsupported(_)
            | E::OffResonance { .. }
            | E::EnergyDirection { .. } => CliError::Usage(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}
