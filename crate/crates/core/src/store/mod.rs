//! Text archives for trained models and serialization of evaluation reports.

mod archive;
mod report;

use std::path::{Path, PathBuf};

pub use archive::{
    load_archive, load_model, save_archive, save_model, ArchivedModel, ModelArchive, ModelKind,
    SplitRecord, FORMAT_VERSION, MAGIC,
};
pub use report::{
    ranked_words_to_json, ranked_words_to_table, report_from_json, report_to_json, report_to_table,
};

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("archive line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("archive truncated at line {line}")]
    Truncated { line: usize },
    #[error("unsupported archive format version {found} (this build reads {supported})")]
    UnsupportedVersion { found: u32, supported: u32 },
    #[error("block {block}: {message}")]
    Block { block: String, message: String },
}

impl StoreError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        StoreError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[cfg(test)]
mod tests;
