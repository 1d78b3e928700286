#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use feature2vec::corpus::{EmbeddingMatrix, PropertyNorms, Triple, Vocabulary};
use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

/// Known-answer dataset: concept vectors are the mean of their true
/// feature directions plus small Gaussian noise.
pub struct Synthetic {
    pub norms: PropertyNorms,
    pub words: Arc<EmbeddingMatrix>,
    pub directions: Array2<f64>,
    pub truth: Vec<BTreeSet<usize>>,
}

pub fn synthetic(
    n_features: usize,
    n_concepts: usize,
    per_concept: usize,
    dim: usize,
    noise: f64,
    pf: u32,
    seed: u64,
) -> Synthetic {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut directions = Array2::<f64>::zeros((n_features, dim));
    for mut row in directions.rows_mut() {
        row.mapv_inplace(|_| StandardNormal.sample(&mut rng));
        let norm = row.dot(&row).sqrt();
        row /= norm;
    }

    // every feature used about equally often, no repeats within a concept
    let slots = n_concepts * per_concept;
    let truth: Vec<BTreeSet<usize>> = loop {
        let mut pool: Vec<usize> = (0..slots).map(|i| i % n_features).collect();
        pool.shuffle(&mut rng);
        let groups: Vec<BTreeSet<usize>> = pool
            .chunks(per_concept)
            .map(|c| c.iter().copied().collect())
            .collect();
        let covered: BTreeSet<usize> = groups.iter().flatten().copied().collect();
        if groups.iter().all(|g| g.len() == per_concept) && covered.len() == n_features {
            break groups;
        }
    };

    let gauss = Normal::new(0.0, noise).unwrap();
    let mut words = Array2::<f64>::zeros((n_concepts, dim));
    for (c, feats) in truth.iter().enumerate() {
        let mut v = Array1::<f64>::zeros(dim);
        for &f in feats {
            v += &directions.row(f);
        }
        v /= per_concept as f64;
        v.mapv_inplace(|x| x + gauss.sample(&mut rng));
        words.row_mut(c).assign(&v);
    }

    let concepts =
        Vocabulary::from_entries((0..n_concepts).map(|i| format!("concept{i:02}"))).unwrap();
    let features =
        Vocabulary::from_entries((0..n_features).map(|i| format!("feature{i:02}"))).unwrap();
    let triples = truth
        .iter()
        .enumerate()
        .flat_map(|(c, fs)| {
            fs.iter().map(move |&f| Triple {
                concept: c,
                feature: f,
                pf,
            })
        })
        .collect();
    let norms = PropertyNorms::new(concepts.clone(), features, triples).unwrap();
    let words = Arc::new(EmbeddingMatrix::new(concepts, words).unwrap());
    Synthetic {
        norms,
        words,
        directions,
        truth,
    }
}

/// The acceptance-criterion fixture: 40 unit features in dim 25, 30
/// concepts with 4 true features each, noise 0.01, pf 5.
pub fn recovery_fixture(seed: u64) -> Synthetic {
    synthetic(40, 30, 4, 25, 0.01, 5, seed)
}

/// GloVe-format text for a matrix.
pub fn embedding_text(m: &EmbeddingMatrix) -> String {
    let mut s = String::new();
    for (i, word) in m.vocab().iter() {
        s.push_str(word);
        for v in m.row(i) {
            s.push(' ');
            s.push_str(&format!("{v:e}"));
        }
        s.push('\n');
    }
    s
}

/// Norms TSV for a table.
pub fn norms_text(n: &PropertyNorms) -> String {
    let mut out = Vec::new();
    n.write_tsv(&mut out).unwrap();
    String::from_utf8(out).unwrap()
}
