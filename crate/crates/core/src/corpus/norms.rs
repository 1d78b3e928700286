use std::collections::HashSet;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use super::{CorpusError, Vocabulary};

/// Exact header line of a norms file.
pub const NORMS_HEADER: &str = "concept\tfeature\tpf";

/// Production frequency below which a pair is normally left out of norm listings.
pub const MIN_LISTED_PF: u32 = 5;

/// One (concept, feature, production frequency) record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Triple {
    pub concept: usize,
    pub feature: usize,
    pub pf: u32,
}

/// Sparse concept x feature production-frequency table.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyNorms {
    concepts: Vocabulary,
    features: Vocabulary,
    triples: Vec<Triple>,
    // per concept, (feature, pf) sorted by feature
    by_concept: Vec<Vec<(usize, u32)>>,
}

impl PropertyNorms {
    pub fn new(
        concepts: Vocabulary,
        features: Vocabulary,
        triples: Vec<Triple>,
    ) -> Result<Self, CorpusError> {
        let mut by_concept = vec![Vec::new(); concepts.len()];
        let mut feature_seen = vec![false; features.len()];
        let mut low_pf = 0usize;
        for t in &triples {
            if t.concept >= concepts.len() || t.feature >= features.len() {
                return Err(CorpusError::Invalid(format!(
                    "triple ({}, {}) out of range",
                    t.concept, t.feature
                )));
            }
            if t.pf == 0 {
                return Err(CorpusError::Invalid(format!(
                    "zero production frequency for ({}, {})",
                    concepts.token(t.concept),
                    features.token(t.feature)
                )));
            }
            if t.pf < MIN_LISTED_PF {
                low_pf += 1;
            }
            by_concept[t.concept].push((t.feature, t.pf));
            feature_seen[t.feature] = true;
        }
        for (c, list) in by_concept.iter_mut().enumerate() {
            if list.is_empty() {
                return Err(CorpusError::Invalid(format!(
                    "concept {:?} has no features",
                    concepts.token(c)
                )));
            }
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(CorpusError::Invalid(format!(
                    "duplicate pair ({}, {})",
                    concepts.token(c),
                    features.token(w[0].0)
                )));
            }
        }
        if let Some(f) = feature_seen.iter().position(|seen| !seen) {
            return Err(CorpusError::Invalid(format!(
                "feature {:?} has no concepts",
                features.token(f)
            )));
        }
        if low_pf > 0 {
            log::warn!("{low_pf} pairs have production frequency below {MIN_LISTED_PF}");
        }
        Ok(Self {
            concepts,
            features,
            triples,
            by_concept,
        })
    }

    pub fn concepts(&self) -> &Vocabulary {
        &self.concepts
    }

    pub fn features(&self) -> &Vocabulary {
        &self.features
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn n_concepts(&self) -> usize {
        self.concepts.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    /// Gold `(feature, pf)` pairs of a concept, sorted by feature index.
    pub fn features_of(&self, concept: usize) -> &[(usize, u32)] {
        &self.by_concept[concept]
    }

    pub fn pf(&self, concept: usize, feature: usize) -> Option<u32> {
        let list = &self.by_concept[concept];
        list.binary_search_by_key(&feature, |&(f, _)| f)
            .ok()
            .map(|i| list[i].1)
    }

    pub fn is_pair(&self, concept: usize, feature: usize) -> bool {
        self.pf(concept, feature).is_some()
    }

    /// Dense production-frequency row for `concept` over the feature vocabulary.
    pub fn frequency_vector(&self, concept: usize) -> Vec<f64> {
        let mut row = vec![0.0; self.n_features()];
        for &(f, pf) in self.features_of(concept) {
            row[f] = f64::from(pf);
        }
        row
    }

    /// Writes the table in the TSV norms format.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{NORMS_HEADER}")?;
        for t in &self.triples {
            writeln!(
                out,
                "{}\t{}\t{}",
                self.concepts.token(t.concept),
                self.features.token(t.feature),
                t.pf
            )?;
        }
        Ok(())
    }
}

pub fn parse_norms_file(path: impl AsRef<Path>) -> Result<PropertyNorms, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| CorpusError::io(path, e))?;
    read_norms(BufReader::new(file)).map_err(|e| e.with_path(path))
}

pub fn read_norms<R: BufRead>(reader: R) -> Result<PropertyNorms, CorpusError> {
    let mut lines = reader.lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => line.map_err(|e| parse_err(1, e.to_string()))?,
        None => return Err(CorpusError::Empty { path: None }),
    };
    if header.trim_end_matches('\r') != NORMS_HEADER {
        return Err(CorpusError::Header {
            path: None,
            found: header,
        });
    }

    let mut concepts = Vocabulary::new();
    let mut features = Vocabulary::new();
    let mut triples = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in lines {
        let lineno = i + 1;
        let line = line.map_err(|e| parse_err(lineno, e.to_string()))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(parse_err(
                lineno,
                format!("expected 3 tab-separated columns, found {}", cols.len()),
            ));
        }
        let pf: i64 = cols[2].trim().parse().map_err(|_| {
            parse_err(
                lineno,
                format!("production frequency {:?} is not an integer", cols[2]),
            )
        })?;
        if pf <= 0 || pf > i64::from(u32::MAX) {
            return Err(parse_err(
                lineno,
                format!("production frequency {pf} must be a positive integer"),
            ));
        }
        let concept = concepts
            .insert(cols[0].trim().to_lowercase())
            .map_err(|e| parse_err(lineno, e.to_string()))?;
        let feature = features
            .insert(cols[1].trim().to_lowercase())
            .map_err(|e| parse_err(lineno, e.to_string()))?;
        if !seen.insert((concept, feature)) {
            return Err(parse_err(
                lineno,
                format!(
                    "duplicate pair ({}, {})",
                    concepts.token(concept),
                    features.token(feature)
                ),
            ));
        }
        triples.push(Triple {
            concept,
            feature,
            pf: pf as u32,
        });
    }
    if triples.is_empty() {
        return Err(CorpusError::Empty { path: None });
    }
    PropertyNorms::new(concepts, features, triples)
}

fn parse_err(line: usize, message: String) -> CorpusError {
    CorpusError::Parse {
        path: None,
        line,
        message,
    }
}
