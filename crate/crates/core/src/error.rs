use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse grouping used by the command line to pick an exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Ingest,
    Runtime,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("adapter error: column `{column}` not found in {path}")]
    MissingColumn { column: String, path: PathBuf },

    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed input in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("invalid document `{id}`: {reason}")]
    InvalidDocument { id: String, reason: String },

    #[error("duplicate document id `{0}`")]
    DuplicateId(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("cannot stratify: class {class} has {count} member(s), at least 2 required")]
    Stratification { class: String, count: usize },

    #[error("both classes must be present (found only class {0})")]
    SingleClass(u8),

    #[error("distribution is not normalized (sum = {sum})")]
    NotNormalized { sum: f64 },

    #[error("corpus `{0}` is empty")]
    EmptyCorpus(String),

    #[error("sample size {requested} exceeds the {available} documents of corpus `{corpus}`")]
    SampleTooLarge {
        corpus: String,
        requested: usize,
        available: usize,
    },

    #[error("length mismatch: {scores} scores vs {labels} labels")]
    LengthMismatch { scores: usize, labels: usize },

    #[error("feature spec mismatch: {0}")]
    FeatureSpecMismatch(String),

    #[error("reports are not comparable: {0}")]
    NotComparable(String),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_stage(stage: &str, source: Error) -> Self {
        Error::Stage {
            stage: stage.to_owned(),
            source: Box::new(source),
        }
    }

    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Config(_) | Error::FeatureSpecMismatch(_) => ErrorCategory::Config,
            Error::MissingColumn { .. }
            | Error::Io { .. }
            | Error::Csv { .. }
            | Error::InvalidDocument { .. }
            | Error::DuplicateId(_) => ErrorCategory::Ingest,
            Error::Stage { source, .. } => match source.category() {
                ErrorCategory::Runtime => ErrorCategory::Runtime,
                other => other,
            },
            _ => ErrorCategory::Runtime,
        }
    }
}
