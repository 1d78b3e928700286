use std::collections::BTreeSet;

use super::{CorpusError, PropertyNorms};
use crate::rng::{seeded_rng, shuffle};

/// Disjoint train/test partition of concept indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataSplit {
    train: BTreeSet<usize>,
    test: BTreeSet<usize>,
    seed: u64,
}

impl DataSplit {
    /// Builds a split over concepts `0..n_concepts`; train and test must be
    /// disjoint and cover every index.
    pub fn new(
        train: BTreeSet<usize>,
        test: BTreeSet<usize>,
        seed: u64,
        n_concepts: usize,
    ) -> Result<Self, CorpusError> {
        if !train.is_disjoint(&test) {
            return Err(CorpusError::Split("train and test overlap".into()));
        }
        if train.len() + test.len() != n_concepts
            || train.iter().chain(&test).any(|&c| c >= n_concepts)
        {
            return Err(CorpusError::Split(format!(
                "split does not cover concepts 0..{n_concepts}"
            )));
        }
        Ok(Self { train, test, seed })
    }

    /// Every concept in training, none held out.
    pub fn all_train(n_concepts: usize, seed: u64) -> Self {
        Self {
            train: (0..n_concepts).collect(),
            test: BTreeSet::new(),
            seed,
        }
    }

    pub fn train(&self) -> &BTreeSet<usize> {
        &self.train
    }

    pub fn test(&self) -> &BTreeSet<usize> {
        &self.test
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Shuffles concept indices with a seeded Fisher-Yates pass (ChaCha8 stream,
/// indices drawn as `u64`) and takes the first `n_train` as training concepts.
pub fn make_split(
    norms: &PropertyNorms,
    n_train: usize,
    seed: u64,
) -> Result<DataSplit, CorpusError> {
    let n = norms.n_concepts();
    if n_train == 0 || n_train >= n {
        return Err(CorpusError::Split(format!(
            "n_train must be in 1..{n}, got {n_train}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    shuffle(&mut seeded_rng(seed), &mut order);
    let train = order[..n_train].iter().copied().collect();
    let test = order[n_train..].iter().copied().collect();
    DataSplit::new(train, test, seed, n)
}
