use ndarray::{Array1, ArrayView1};

use super::{F2vError, F2vModel};
use crate::linalg::{cosine, rank_descending};

/// Feature indices ordered by cosine similarity to `word`, best first,
/// truncated to `top_k`. Ties go to the lower feature index.
pub fn rank_feature_indices(
    model: &F2vModel,
    word: ArrayView1<'_, f64>,
    top_k: usize,
) -> Result<Vec<(usize, f64)>, F2vError> {
    if word.len() != model.dim() {
        return Err(F2vError::DimensionMismatch {
            config: model.dim(),
            words: word.len(),
        });
    }
    if word.iter().all(|&v| v == 0.0) {
        return Err(F2vError::ZeroVector);
    }
    let scores: Vec<f64> = model
        .embeddings
        .rows()
        .into_iter()
        .map(|row| cosine(row, word))
        .collect();
    Ok(rank_descending(&scores, top_k))
}

/// Named variant of [`rank_feature_indices`].
pub fn rank_features_for_word(
    model: &F2vModel,
    word: ArrayView1<'_, f64>,
    top_k: usize,
) -> Result<Vec<(String, f64)>, F2vError> {
    Ok(rank_feature_indices(model, word, top_k)?
        .into_iter()
        .map(|(f, score)| (model.features.token(f).to_string(), score))
        .collect())
}

/// Mean of the listed feature rows, optionally weighted (weights are
/// normalized to sum to one).
pub fn compose_concept_embedding(
    model: &F2vModel,
    features: &[usize],
    weights: Option<&[f64]>,
) -> Result<Array1<f64>, F2vError> {
    if features.is_empty() {
        return Err(F2vError::EmptyFeatures);
    }
    if let Some(&f) = features.iter().find(|&&f| f >= model.features.len()) {
        return Err(F2vError::Index(format!("feature {f}")));
    }
    let uniform;
    let weights = match weights {
        Some(w) => {
            if w.len() != features.len() {
                return Err(F2vError::Weights(format!(
                    "{} weights for {} features",
                    w.len(),
                    features.len()
                )));
            }
            if w.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                return Err(F2vError::Weights("weights must be positive".into()));
            }
            w
        }
        None => {
            uniform = vec![1.0; features.len()];
            &uniform
        }
    };
    let total: f64 = weights.iter().sum();
    let mut out = Array1::zeros(model.dim());
    for (&f, &w) in features.iter().zip(weights) {
        out.scaled_add(w / total, &model.embeddings.row(f));
    }
    Ok(out)
}
