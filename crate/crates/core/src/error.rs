use thiserror::Error;

/// Error type shared by every pipeline stage.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("invalid data: {0}")]
    Data(String),

    #[error("snapshot version mismatch: file has v{found}, this build reads v{expected}")]
    SnapshotVersion { found: u32, expected: u32 },

    #[error("artifact {kind} is corrupt: {detail}")]
    Artifact { kind: &'static str, detail: String },

    #[error("design matrix is rank deficient; collinear columns: {0:?}")]
    RankDeficient(Vec<String>),

    #[error("regressor {0} has no within-entity variation")]
    NoWithinVariation(String),

    #[error("training refused: {0}")]
    Training(String),

    #[error("pipeline stage `{stage}` failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable numeric class used for process exit codes.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Io { .. } => 3,
            Error::Data(_) | Error::SnapshotVersion { .. } | Error::Artifact { .. } => 4,
            Error::RankDeficient(_) | Error::NoWithinVariation(_) | Error::Training(_) => 5,
            Error::Stage { source, .. } => source.exit_code(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
