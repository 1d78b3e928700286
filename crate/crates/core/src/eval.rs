//! Retrieval and feature-overlap metrics, plus drivers that evaluate a
//! trained model on an aligned dataset.

use std::collections::{BTreeMap, BTreeSet};

use ndarray::{Array1, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::corpus::{AlignedNorms, DataSplit, EmbeddingMatrix, PropertyNorms, Vocabulary};
use crate::f2v::{self, F2vError, F2vModel};
use crate::linalg::cosine;
use crate::plsr::{self, PlsrError, PlsrModel};

pub const DEFAULT_NS: [usize; 4] = [1, 5, 10, 20];

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("no vector for concept {0}")]
    MissingVector(usize),
    #[error("retrieval pool is empty")]
    EmptyPool,
    #[error("concept {0} is not in the retrieval pool")]
    NotInPool(usize),
    #[error("nothing to evaluate")]
    EmptySet,
    #[error("concept {0} has no gold features")]
    NoGold(usize),
    #[error("ranking for concept {concept} has {got} items, need {needed}")]
    ShortRanking {
        concept: usize,
        got: usize,
        needed: usize,
    },
    #[error("N must be positive")]
    ZeroN,
    #[error(transparent)]
    F2v(#[from] F2vError),
    #[error(transparent)]
    Plsr(#[from] PlsrError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Similarity {
    #[default]
    Cosine,
    /// Negative Euclidean distance.
    Euclidean,
}

impl Similarity {
    pub fn score(self, a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
        match self {
            Similarity::Cosine => cosine(a, b),
            Similarity::Euclidean => -(&a - &b).mapv(|v| v * v).sum().sqrt(),
        }
    }
}

/// Which concepts compete as neighbours in retrieval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pool {
    #[default]
    All,
    Test,
}

/// Percent of evaluated concepts whose own gold vector ranks within the top
/// `N` pool members by similarity to the predicted vector. Ties between pool
/// members go to the lower concept index.
pub fn top_n_retrieval(
    predicted: &BTreeMap<usize, Array1<f64>>,
    gold: &BTreeMap<usize, Array1<f64>>,
    pool: &BTreeSet<usize>,
    ns: &[usize],
    similarity: Similarity,
) -> Result<BTreeMap<usize, f64>, EvalError> {
    if pool.is_empty() {
        return Err(EvalError::EmptyPool);
    }
    if predicted.is_empty() {
        return Err(EvalError::EmptySet);
    }
    if ns.contains(&0) {
        return Err(EvalError::ZeroN);
    }
    if let Some(&c) = pool.iter().find(|c| !gold.contains_key(c)) {
        return Err(EvalError::MissingVector(c));
    }
    let mut ranks = Vec::with_capacity(predicted.len());
    for (&concept, pred) in predicted {
        if !pool.contains(&concept) {
            return Err(EvalError::NotInPool(concept));
        }
        let own = similarity.score(pred.view(), gold[&concept].view());
        let better = pool
            .iter()
            .filter(|&&other| other != concept)
            .filter(|&&other| {
                let s = similarity.score(pred.view(), gold[&other].view());
                s > own || (s == own && other < concept)
            })
            .count();
        ranks.push(better + 1);
    }
    let n = ranks.len() as f64;
    Ok(ns
        .iter()
        .map(|&top| {
            let hits = ranks.iter().filter(|&&r| r <= top).count();
            (top, 100.0 * hits as f64 / n)
        })
        .collect())
}

/// Mean over `concepts` of the percentage of a concept's `K` gold features
/// found among the ranker's first `K` predictions. The ranker receives the
/// concept and `K`.
pub fn top_k_overlap<F>(
    mut ranker: F,
    norms: &PropertyNorms,
    concepts: &BTreeSet<usize>,
) -> Result<f64, EvalError>
where
    F: FnMut(usize, usize) -> Result<Vec<usize>, EvalError>,
{
    if concepts.is_empty() {
        return Err(EvalError::EmptySet);
    }
    let mut total = 0.0;
    for &c in concepts {
        let gold = norms.features_of(c);
        let k = gold.len();
        if k == 0 {
            return Err(EvalError::NoGold(c));
        }
        let ranked = ranker(c, k)?;
        if ranked.len() < k {
            return Err(EvalError::ShortRanking {
                concept: c,
                got: ranked.len(),
                needed: k,
            });
        }
        let hits = ranked[..k].iter().filter(|&&f| norms.is_pair(c, f)).count();
        total += 100.0 * hits as f64 / k as f64;
    }
    Ok(total / concepts.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankRow {
    pub feature: String,
    pub score: f64,
    pub in_gold: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedWord {
    pub word: String,
    pub rows: Result<Vec<RankRow>, String>,
}

/// Top-ranked features per word with gold-pair marks. Words missing from
/// the lexicon yield an error entry; the rest are still ranked.
pub fn qualitative_table_with<F>(
    mut ranker: F,
    features: &Vocabulary,
    words: &[String],
    lexicon: &EmbeddingMatrix,
    norms: &PropertyNorms,
) -> Vec<RankedWord>
where
    F: FnMut(ArrayView1<'_, f64>) -> Result<Vec<(usize, f64)>, EvalError>,
{
    words
        .iter()
        .map(|word| {
            let word = word.to_lowercase();
            let rows = match lexicon.vector(&word) {
                None => Err(format!("{word:?} is not in the lexicon")),
                Some(v) => ranker(v).map_err(|e| e.to_string()).map(|ranked| {
                    let concept = norms.concepts().get(&word);
                    ranked
                        .into_iter()
                        .map(|(f, score)| {
                            let name = features.token(f);
                            let in_gold = concept
                                .zip(norms.features().get(name))
                                .is_some_and(|(c, nf)| norms.is_pair(c, nf));
                            RankRow {
                                feature: name.to_string(),
                                score,
                                in_gold,
                            }
                        })
                        .collect()
                }),
            };
            RankedWord { word, rows }
        })
        .collect()
}

/// [`qualitative_table_with`] for a Feature2Vec model.
pub fn qualitative_table(
    model: &F2vModel,
    words: &[String],
    lexicon: &EmbeddingMatrix,
    top_k: usize,
    norms: &PropertyNorms,
) -> Vec<RankedWord> {
    qualitative_table_with(
        |v| Ok(f2v::rank_feature_indices(model, v, top_k)?),
        model.features(),
        words,
        lexicon,
        norms,
    )
}

/// Structured evaluation results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub method: String,
    pub dataset: String,
    pub split_seed: u64,
    pub pool: Pool,
    pub retrieval: BTreeMap<usize, f64>,
    pub overlap_train: f64,
    pub overlap_test: f64,
    pub parameters: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalOptions {
    pub ns: Vec<usize>,
    pub pool: Pool,
    pub similarity: Similarity,
    /// Weight feature rows by production frequency when composing concepts.
    pub weighted: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            ns: DEFAULT_NS.to_vec(),
            pool: Pool::All,
            similarity: Similarity::Cosine,
            weighted: false,
        }
    }
}

fn pool_set(data: &AlignedNorms, split: &DataSplit, pool: Pool) -> BTreeSet<usize> {
    match pool {
        Pool::All => (0..data.norms.n_concepts()).collect(),
        Pool::Test => split.test().clone(),
    }
}

fn base_parameters(opts: &EvalOptions) -> BTreeMap<String, String> {
    BTreeMap::from([
        (
            "similarity".to_string(),
            format!("{:?}", opts.similarity).to_lowercase(),
        ),
        (
            "composition".to_string(),
            if opts.weighted { "weighted" } else { "mean" }.to_string(),
        ),
    ])
}

/// Retrieval of held-out concepts from composed feature embeddings (word
/// space), and top-K feature overlap on both halves of the split.
pub fn evaluate_f2v(
    model: &F2vModel,
    data: &AlignedNorms,
    split: &DataSplit,
    opts: &EvalOptions,
    dataset: &str,
) -> Result<EvalReport, EvalError> {
    let norms = &data.norms;
    let words = &data.vectors;
    let mut predicted = BTreeMap::new();
    for &c in split.test() {
        let gold = norms.features_of(c);
        let features: Vec<usize> = gold.iter().map(|&(f, _)| f).collect();
        let weights: Vec<f64> = gold.iter().map(|&(_, pf)| f64::from(pf)).collect();
        let composed = f2v::compose_concept_embedding(
            model,
            &features,
            opts.weighted.then_some(weights.as_slice()),
        )?;
        predicted.insert(c, composed);
    }
    let pool = pool_set(data, split, opts.pool);
    let gold: BTreeMap<usize, Array1<f64>> =
        pool.iter().map(|&c| (c, words.row(c).to_owned())).collect();
    let retrieval = top_n_retrieval(&predicted, &gold, &pool, &opts.ns, opts.similarity)?;

    let ranker = |c: usize, k: usize| -> Result<Vec<usize>, EvalError> {
        Ok(f2v::rank_feature_indices(model, words.row(c), k)?
            .into_iter()
            .map(|(f, _)| f)
            .collect())
    };
    let mut parameters = base_parameters(opts);
    parameters.insert("epochs".into(), model.config().epochs.to_string());
    parameters.insert(
        "negative_rate".into(),
        model.config().negative_rate.to_string(),
    );
    parameters.insert(
        "learning_rate".into(),
        model.config().learning_rate.to_string(),
    );
    Ok(EvalReport {
        method: "feature2vec".into(),
        dataset: dataset.into(),
        split_seed: split.seed(),
        pool: opts.pool,
        retrieval,
        overlap_train: top_k_overlap(ranker, norms, split.train())?,
        overlap_test: top_k_overlap(ranker, norms, split.test())?,
        parameters,
    })
}

/// Retrieval of held-out concepts from predicted feature vectors (feature
/// space), and top-K overlap of the largest predicted weights.
pub fn evaluate_plsr(
    model: &PlsrModel,
    data: &AlignedNorms,
    split: &DataSplit,
    opts: &EvalOptions,
    dataset: &str,
) -> Result<EvalReport, EvalError> {
    let norms = &data.norms;
    let words = &data.vectors;
    let mut predicted = BTreeMap::new();
    for &c in split.test() {
        predicted.insert(c, model.predict(words.row(c))?);
    }
    let pool = pool_set(data, split, opts.pool);
    let gold: BTreeMap<usize, Array1<f64>> = pool
        .iter()
        .map(|&c| (c, Array1::from(norms.frequency_vector(c))))
        .collect();
    let retrieval = top_n_retrieval(&predicted, &gold, &pool, &opts.ns, opts.similarity)?;

    let ranker = |c: usize, k: usize| -> Result<Vec<usize>, EvalError> {
        Ok(plsr::top_k_features_from_prediction(
            model.predict(words.row(c))?.view(),
            k,
        ))
    };
    let mut parameters = base_parameters(opts);
    parameters.insert("components".into(), model.n_components().to_string());
    Ok(EvalReport {
        method: format!("plsr-{}", model.n_components()),
        dataset: dataset.into(),
        split_seed: split.seed(),
        pool: opts.pool,
        retrieval,
        overlap_train: top_k_overlap(ranker, norms, split.train())?,
        overlap_test: top_k_overlap(ranker, norms, split.test())?,
        parameters,
    })
}
