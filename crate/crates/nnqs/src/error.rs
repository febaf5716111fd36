use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("encoding error: {0}")]
    Encoding(String),

    #[error("ansatz amplitude is zero at the reference configuration")]
    ZeroAmplitudeReference,

    #[error("ansatz amplitude is zero; log-derivatives are undefined")]
    ZeroAmplitude,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("no electron-number-conserving move exists for this configuration")]
    DegenerateConfiguration,

    #[error("empty sample set")]
    EmptySampleSet,

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("linear system is singular even with the diagonal shift")]
    SingularSystem,

    #[error("Hamiltonian couples configuration {0:#b} outside the particle-number sector")]
    SectorLeakage(u64),

    #[error("sector of dimension {dim} exceeds the exact-oracle limit of {limit}")]
    SectorTooLarge { dim: u128, limit: usize },

    #[error("wave function has zero norm on the sector")]
    Normalization,

    #[error("eigensolver did not converge: {0}")]
    ConvergenceFailure(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// Attaches a file path to an error raised while reading that file.
    pub fn in_file(self, path: impl Into<PathBuf>) -> Self {
        Error::File {
            path: path.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, looking through file context.
    pub fn root(&self) -> &Error {
        match self {
            Error::File { source, .. } => source.root(),
            other => other,
        }
    }
}
