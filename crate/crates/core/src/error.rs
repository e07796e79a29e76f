use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("manifest {path}: {message}")]
    Manifest { path: PathBuf, message: String },

    #[error("missing text files for documents: {}", .0.iter().map(|m| format!("{} ({})", m.id, m.path.display())).collect::<Vec<_>>().join(", "))]
    MissingFiles(Vec<MissingFile>),

    #[error("invalid replacement table: {0}")]
    ReplacementTable(String),

    #[error("invalid lexicon: {0}")]
    Lexicon(String),

    #[error("invalid word groups: {0}")]
    WordGroups(String),

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("sample too small: need at least {needed} values, got {got}")]
    SampleTooSmall { needed: usize, got: usize },

    #[error("group {group} has {got} usable observations, need at least {needed}")]
    GroupTooSmall {
        group: String,
        got: usize,
        needed: usize,
    },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("fit failed for K={k}: {source}")]
    Sweep {
        k: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("unsupported file version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MissingFile {
    pub row: usize,
    pub id: String,
    pub path: PathBuf,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }

    /// Short stable identifier, used for machine-readable error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Csv { .. } => "csv",
            Error::Json(_) => "json",
            Error::Manifest { .. } => "manifest",
            Error::MissingFiles(_) => "missing_files",
            Error::ReplacementTable(_) => "replacement_table",
            Error::Lexicon(_) => "lexicon",
            Error::WordGroups(_) => "word_groups",
            Error::EmptyCorpus => "empty_corpus",
            Error::SampleTooSmall { .. } => "sample_too_small",
            Error::GroupTooSmall { .. } => "group_too_small",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::Config(_) => "config",
            Error::Sweep { .. } => "sweep",
            Error::Version { .. } => "version",
        }
    }
}
