use ndarray::{Array1, ArrayView1};

use super::{F2vError, F2vModel, Label};

/// `ln σ(s)` without overflow for large `|s|`.
pub fn log_sigmoid(s: f64) -> f64 {
    if s >= 0.0 {
        -(-s).exp().ln_1p()
    } else {
        s - s.exp().ln_1p()
    }
}

pub fn sigmoid(s: f64) -> f64 {
    if s >= 0.0 {
        1.0 / (1.0 + (-s).exp())
    } else {
        let e = s.exp();
        e / (1.0 + e)
    }
}

/// Loss and `d loss / d s` for one pair with logit `s`. Negatives carry a
/// `1/k` weight.
pub(crate) fn loss_and_slope(s: f64, label: Label, negative_rate: usize) -> (f64, f64) {
    match label {
        Label::Positive => (-log_sigmoid(s), sigmoid(s) - 1.0),
        Label::Negative => {
            let w = 1.0 / negative_rate as f64;
            (-w * log_sigmoid(-s), w * sigmoid(s))
        }
    }
}

/// Loss and gradient with respect to the feature row for a single
/// (concept, feature) pair. The word vector receives no gradient.
pub fn pair_loss_and_grad(
    model: &F2vModel,
    concept: usize,
    feature: usize,
    label: Label,
) -> Result<(f64, Array1<f64>), F2vError> {
    if concept >= model.words.len() {
        return Err(F2vError::Index(format!("concept {concept}")));
    }
    if feature >= model.features.len() {
        return Err(F2vError::Index(format!("feature {feature}")));
    }
    let word = model.words.row(concept);
    Ok(vector_loss_and_grad(
        model.feature_row(feature),
        word,
        label,
        model.config.negative_rate,
    ))
}

/// Same as [`pair_loss_and_grad`] on raw vectors.
pub fn vector_loss_and_grad(
    feature: ArrayView1<'_, f64>,
    word: ArrayView1<'_, f64>,
    label: Label,
    negative_rate: usize,
) -> (f64, Array1<f64>) {
    let s = feature.dot(&word);
    let (loss, slope) = loss_and_slope(s, label, negative_rate);
    (loss, &word * slope)
}
