use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{field}: value is not finite")]
    NonFinite { field: &'static str },

    #[error("omega0: angular frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),

    #[error("atom positions coincide")]
    CoincidentAtoms,

    #[error("points closer than {min:e} m; use the imaginary-part coincidence path")]
    CoincidentPoints { min: f64 },

    #[error("{field}: point must lie above the mirror (z > 0), got z = {z}")]
    NotAboveMirror { field: &'static str, z: f64 },

    #[error("{field}: must be {requirement}, got {value}")]
    OutOfDomain { field: &'static str, value: f64, requirement: &'static str },

    #[error("{field}: {reason}")]
    Config { field: String, reason: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config { field: field.into(), reason: reason.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit code: 2 for I/O failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
