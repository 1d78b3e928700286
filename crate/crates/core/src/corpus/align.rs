use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use ndarray::Array2;

use super::{CorpusError, EmbeddingMatrix, PropertyNorms, Triple, Vocabulary};

/// Header line of an alias file.
pub const ALIAS_HEADER: &str = "concept\tword";

/// Maps norm concept names (e.g. `axe_(tool)`) to lexicon words.
pub type AliasMap = HashMap<String, String>;

/// Norms restricted to concepts that have a pretrained vector.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedNorms {
    pub norms: PropertyNorms,
    /// Row `i` is the word vector for concept `i`, keyed by concept name.
    pub vectors: EmbeddingMatrix,
    pub dropped_concepts: Vec<String>,
    pub dropped_features: Vec<String>,
}

impl AlignedNorms {
    /// Writes `DROPPED <name>` lines for every removed concept.
    pub fn write_report<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for name in &self.dropped_concepts {
            writeln!(out, "DROPPED {name}")?;
        }
        Ok(())
    }
}

/// Resolves the lexicon word used for `concept`.
pub fn lexicon_word<'a>(concept: &'a str, aliases: Option<&'a AliasMap>) -> &'a str {
    aliases
        .and_then(|a| a.get(concept))
        .map(String::as_str)
        .unwrap_or(concept)
}

/// Drops concepts without a word vector (after aliasing) and any features
/// left without triples.
pub fn align(
    norms: &PropertyNorms,
    embeddings: &EmbeddingMatrix,
    aliases: Option<&AliasMap>,
) -> Result<AlignedNorms, CorpusError> {
    let mut concept_map = vec![None; norms.n_concepts()];
    let mut concepts = Vocabulary::new();
    let mut rows: Vec<f64> = Vec::new();
    let mut dropped_concepts = Vec::new();
    for (c, name) in norms.concepts().iter() {
        match embeddings.vector(lexicon_word(name, aliases)) {
            Some(v) => {
                concept_map[c] = Some(concepts.insert(name)?);
                rows.extend(v.iter());
            }
            None => dropped_concepts.push(name.to_string()),
        }
    }
    if concepts.is_empty() {
        return Err(CorpusError::NothingAligned);
    }

    let mut feature_map = vec![None; norms.n_features()];
    let mut features = Vocabulary::new();
    let mut triples = Vec::new();
    for t in norms.triples() {
        let Some(concept) = concept_map[t.concept] else {
            continue;
        };
        let feature = match feature_map[t.feature] {
            Some(f) => f,
            None => {
                let f = features.insert(norms.features().token(t.feature))?;
                feature_map[t.feature] = Some(f);
                f
            }
        };
        triples.push(Triple {
            concept,
            feature,
            pf: t.pf,
        });
    }
    // features are re-indexed in order of first surviving appearance, which
    // is the original order when nothing is dropped
    let dropped_features = norms
        .features()
        .iter()
        .filter(|(f, _)| feature_map[*f].is_none())
        .map(|(_, name)| name.to_string())
        .collect();

    let n = concepts.len();
    let vectors = EmbeddingMatrix::new(
        concepts.clone(),
        Array2::from_shape_vec((n, embeddings.dim()), rows)
            .map_err(|e| CorpusError::Shape(e.to_string()))?,
    )?;
    Ok(AlignedNorms {
        norms: PropertyNorms::new(concepts, features, triples)?,
        vectors,
        dropped_concepts,
        dropped_features,
    })
}

pub fn parse_alias_file(path: impl AsRef<Path>) -> Result<AliasMap, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| CorpusError::io(path, e))?;
    read_aliases(BufReader::new(file)).map_err(|e| e.with_path(path))
}

/// Reads a two-column TSV (`concept<TAB>word`, with header).
pub fn read_aliases<R: BufRead>(reader: R) -> Result<AliasMap, CorpusError> {
    let mut map = AliasMap::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| CorpusError::Parse {
            path: None,
            line: lineno,
            message: e.to_string(),
        })?;
        let line = line.trim_end_matches('\r');
        if lineno == 1 {
            if line != ALIAS_HEADER {
                return Err(CorpusError::Header {
                    path: None,
                    found: line.to_string(),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let Some((concept, word)) = line.split_once('\t') else {
            return Err(CorpusError::Parse {
                path: None,
                line: lineno,
                message: "expected concept<TAB>word".into(),
            });
        };
        map.insert(concept.trim().to_lowercase(), word.trim().to_lowercase());
    }
    Ok(map)
}
