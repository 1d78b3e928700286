//! Ingestion of pretrained word vectors and property norms, alignment of
//! the two, and seeded train/test splits.

mod align;
mod embeddings;
mod norms;
mod split;
mod vocab;

use std::path::{Path, PathBuf};

pub use align::{
    align, lexicon_word, parse_alias_file, read_aliases, AliasMap, AlignedNorms, ALIAS_HEADER,
};
pub use embeddings::{load_embeddings, parse_embedding_file, read_embeddings, EmbeddingMatrix};
pub use norms::{parse_norms_file, read_norms, PropertyNorms, Triple, MIN_LISTED_PF, NORMS_HEADER};
pub use split::{make_split, DataSplit};
pub use vocab::Vocabulary;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}line {line}: {message}", prefix(path))]
    Parse {
        path: Option<PathBuf>,
        line: usize,
        message: String,
    },
    #[error(
        "{}line {line}: expected {expected} values, found {found}",
        prefix(path)
    )]
    Dimension {
        path: Option<PathBuf>,
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("{}no records", prefix(path))]
    Empty { path: Option<PathBuf> },
    #[error("{}missing or malformed header, found {found:?}", prefix(path))]
    Header {
        path: Option<PathBuf>,
        found: String,
    },
    #[error("duplicate token {0:?}")]
    DuplicateToken(String),
    #[error("invalid token {0:?}: tokens must be non-empty without whitespace")]
    InvalidToken(String),
    #[error("non-finite embedding value for {0:?}")]
    NonFinite(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("invalid norms: {0}")]
    Invalid(String),
    #[error("no concept has a pretrained vector")]
    NothingAligned,
    #[error("invalid split: {0}")]
    Split(String),
}

fn prefix(path: &Option<PathBuf>) -> String {
    path.as_ref()
        .map(|p| format!("{}: ", p.display()))
        .unwrap_or_default()
}

impl CorpusError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CorpusError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn with_path(self, p: &Path) -> Self {
        let p = Some(p.to_path_buf());
        match self {
            CorpusError::Parse { line, message, .. } => CorpusError::Parse {
                path: p,
                line,
                message,
            },
            CorpusError::Dimension {
                line,
                expected,
                found,
                ..
            } => CorpusError::Dimension {
                path: p,
                line,
                expected,
                found,
            },
            CorpusError::Empty { .. } => CorpusError::Empty { path: p },
            CorpusError::Header { found, .. } => CorpusError::Header { path: p, found },
            other => other,
        }
    }
}
