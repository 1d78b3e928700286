use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use ndarray::{Array2, ArrayView1};

use super::{CorpusError, Vocabulary};

/// Dense word vectors, one row per vocabulary entry.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    vocab: Vocabulary,
    rows: Array2<f64>,
}

impl EmbeddingMatrix {
    pub fn new(vocab: Vocabulary, rows: Array2<f64>) -> Result<Self, CorpusError> {
        if rows.nrows() != vocab.len() {
            return Err(CorpusError::Shape(format!(
                "{} rows for a vocabulary of {}",
                rows.nrows(),
                vocab.len()
            )));
        }
        if rows.ncols() == 0 {
            return Err(CorpusError::Shape("embedding dimension is zero".into()));
        }
        if let Some((r, _)) = rows.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(CorpusError::NonFinite(vocab.token(r.0).to_string()));
        }
        Ok(Self { vocab, rows })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn rows(&self) -> &Array2<f64> {
        &self.rows
    }

    pub fn dim(&self) -> usize {
        self.rows.ncols()
    }

    pub fn len(&self) -> usize {
        self.rows.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.nrows() == 0
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.rows.row(i)
    }

    pub fn vector(&self, word: &str) -> Option<ArrayView1<'_, f64>> {
        self.vocab.get(word).map(|i| self.rows.row(i))
    }
}

/// Loads a GloVe-format text file (`word v1 ... vd` per line, no header).
pub fn parse_embedding_file(
    path: impl AsRef<Path>,
    expected_dim: Option<usize>,
) -> Result<EmbeddingMatrix, CorpusError> {
    load_embeddings(path, expected_dim, None)
}

/// Like [`parse_embedding_file`] but keeps only words in `keep` (compared
/// after lowercasing). Dimension checks still apply to every line.
pub fn load_embeddings(
    path: impl AsRef<Path>,
    expected_dim: Option<usize>,
    keep: Option<&HashSet<String>>,
) -> Result<EmbeddingMatrix, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| CorpusError::io(path, e))?;
    read_embeddings(BufReader::new(file), expected_dim, keep).map_err(|e| e.with_path(path))
}

pub fn read_embeddings<R: BufRead>(
    reader: R,
    expected_dim: Option<usize>,
    keep: Option<&HashSet<String>>,
) -> Result<EmbeddingMatrix, CorpusError> {
    let mut vocab = Vocabulary::new();
    let mut data: Vec<f64> = Vec::new();
    let mut dim: Option<usize> = None;
    let mut duplicates = 0usize;
    let mut saw_record = false;

    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| CorpusError::Parse {
            path: None,
            line: lineno,
            message: e.to_string(),
        })?;
        let mut fields = line.split_ascii_whitespace();
        let Some(word) = fields.next() else { continue };
        saw_record = true;
        let word = word.to_lowercase();

        let start = data.len();
        let wanted = keep.is_none_or(|k| k.contains(&word)) && !vocab.contains(&word);
        let mut count = 0usize;
        for tok in fields {
            let value: f64 = tok.parse().map_err(|_| CorpusError::Parse {
                path: None,
                line: lineno,
                message: format!("non-numeric value {tok:?}"),
            })?;
            if wanted {
                data.push(value);
            }
            count += 1;
        }

        let d = *dim.get_or_insert(count);
        if count != d || count == 0 {
            return Err(CorpusError::Dimension {
                path: None,
                line: lineno,
                expected: d,
                found: count,
            });
        }
        if let Some(expected) = expected_dim {
            if d != expected {
                return Err(CorpusError::Dimension {
                    path: None,
                    line: lineno,
                    expected,
                    found: d,
                });
            }
        }

        if vocab.contains(&word) {
            duplicates += 1;
            log::warn!("duplicate embedding for {word:?} on line {lineno}; keeping the first");
            continue;
        }
        if !wanted {
            data.truncate(start);
            continue;
        }
        if let Some(bad) = data[start..].iter().find(|v| !v.is_finite()) {
            return Err(CorpusError::Parse {
                path: None,
                line: lineno,
                message: format!("non-finite value {bad}"),
            });
        }
        vocab.insert(word)?;
    }

    if !saw_record {
        return Err(CorpusError::Empty { path: None });
    }
    if duplicates > 0 {
        log::warn!("{duplicates} duplicate embedding rows ignored");
    }
    let dim = dim.unwrap_or(0);
    let rows = Array2::from_shape_vec((vocab.len(), dim), data)
        .map_err(|e| CorpusError::Shape(e.to_string()))?;
    EmbeddingMatrix::new(vocab, rows)
}
