use std::collections::BTreeMap;
use std::sync::Arc;

use ndarray::Array1;

use super::loss::loss_and_slope;
use super::{
    adam_update, build_epoch_samples, init_model, EpochSamples, F2vConfig, F2vError, F2vModel,
    Label, Sample,
};
use crate::corpus::{DataSplit, EmbeddingMatrix, PropertyNorms};
use crate::rng::seeded_rng;

/// Stream of the seeded generator used for epoch sampling; stream 0 is
/// reserved for initialization.
const SAMPLING_STREAM: u64 = 1;

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: F2vModel,
    /// Mean per-sample loss of each epoch.
    pub loss_trace: Vec<f64>,
}

/// Trains feature embeddings against the frozen concept vectors in `words`
/// (row `i` is concept `i` of `norms`).
///
/// Each batch minimizes the mean weighted loss over its samples.
pub fn train(
    norms: &PropertyNorms,
    split: &DataSplit,
    words: Arc<EmbeddingMatrix>,
    config: &F2vConfig,
) -> Result<TrainOutcome, F2vError> {
    let mut model = init_model(norms, words, config)?;
    let mut rng = seeded_rng(config.seed);
    rng.set_stream(SAMPLING_STREAM);

    let mut loss_trace = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        let samples = build_epoch_samples(norms, split, config, &mut rng)?;
        let order = samples.shuffled(&mut rng);
        let mut total = 0.0;
        for batch in order.chunks(config.batch_size) {
            total += train_batch(&mut model, batch)?;
        }
        let mean = total / order.len() as f64;
        log::debug!("epoch {} mean loss {mean:.6}", epoch + 1);
        loss_trace.push(mean);
    }
    Ok(TrainOutcome { model, loss_trace })
}

/// Accumulates gradients for one batch, applies Adam, and returns the summed
/// loss of the batch (evaluated before the update).
pub fn train_batch(model: &mut F2vModel, batch: &[Sample]) -> Result<f64, F2vError> {
    let k = model.config.negative_rate;
    let scale = 1.0 / batch.len() as f64;
    let mut grads: BTreeMap<usize, Array1<f64>> = BTreeMap::new();
    let mut total = 0.0;
    for s in batch {
        let word = model.words.row(s.concept);
        let logit = model.embeddings.row(s.feature).dot(&word);
        let (loss, slope) = loss_and_slope(logit, s.label, k);
        total += loss;
        grads
            .entry(s.feature)
            .or_insert_with(|| Array1::zeros(model.config.dim))
            .scaled_add(slope * scale, &word);
    }
    adam_update(model, &grads)?;
    model.check_finite()?;
    Ok(total)
}

/// Summed weighted loss of every sample in `samples` under `model`.
pub fn epoch_loss(model: &F2vModel, samples: &EpochSamples) -> f64 {
    let k = model.config.negative_rate;
    let term = |&(c, f): &(usize, usize), label| {
        let s = model.embeddings.row(f).dot(&model.words.row(c));
        loss_and_slope(s, label, k).0
    };
    samples
        .positives
        .iter()
        .map(|p| term(p, Label::Positive))
        .sum::<f64>()
        + samples
            .negatives
            .iter()
            .map(|p| term(p, Label::Negative))
            .sum::<f64>()
}
