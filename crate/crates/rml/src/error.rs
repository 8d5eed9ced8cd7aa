use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

/// Pipeline stage that produced an error, reported alongside it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Load,
    Split,
    Triplets,
    Noise,
    Solve,
    Evaluate,
    Write,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Load => "load",
            Stage::Split => "split",
            Stage::Triplets => "triplets",
            Stage::Noise => "noise",
            Stage::Solve => "solve",
            Stage::Evaluate => "evaluate",
            Stage::Write => "write",
        })
    }
}

#[derive(Debug, Error)]
pub enum RmlError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}: row {row}: {message}")]
    Parse {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },

    #[error("{stage} stage failed: {source}")]
    Core {
        stage: Stage,
        source: rml_core::Error,
    },
}

pub type Result<T> = std::result::Result<T, RmlError>;

impl RmlError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        RmlError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, row: usize, message: impl Into<String>) -> Self {
        RmlError::Parse {
            path: path.into(),
            row,
            message: message.into(),
        }
    }

    /// 1 usage, 2 io/parse/data, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            RmlError::Usage(_) => 1,
            RmlError::Io { .. } | RmlError::Parse { .. } | RmlError::Json { .. } => 2,
            RmlError::Core { source, .. } => match source {
                rml_core::Error::NumericalFailure { .. } => 3,
                rml_core::Error::InvalidInput(_) => 1,
                _ => 2,
            },
        }
    }
}

/// Attaches a [`Stage`] to core errors.
pub trait AtStage<T> {
    fn at(self, stage: Stage) -> Result<T>;
}

impl<T> AtStage<T> for std::result::Result<T, rml_core::Error> {
    fn at(self, stage: Stage) -> Result<T> {
        self.map_err(|source| RmlError::Core { stage, source })
    }
}
