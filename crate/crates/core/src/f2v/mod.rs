//! Feature embeddings trained with skip-gram negative sampling against a
//! frozen word space: concept vectors act as targets, norm features as
//! contexts, and production frequencies as co-occurrence counts.

mod adam;
mod config;
mod infer;
mod loss;
mod model;
mod sampling;
mod train;

pub use adam::adam_update;
pub use config::F2vConfig;
pub use infer::{compose_concept_embedding, rank_feature_indices, rank_features_for_word};
pub use loss::{log_sigmoid, pair_loss_and_grad, sigmoid, vector_loss_and_grad};
pub use model::{init_model, AdamState, F2vModel};
pub use sampling::{build_epoch_samples, EpochSamples, Label, Sample};
pub use train::{epoch_loss, train, train_batch, TrainOutcome};

#[derive(Debug, thiserror::Error)]
pub enum F2vError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("embedding dimension {config} does not match word vectors of dimension {words}")]
    DimensionMismatch { config: usize, words: usize },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("index out of range: {0}")]
    Index(String),
    #[error("no training concepts")]
    EmptyTraining,
    #[error("concept {0:?} lists every feature; no negative can be drawn")]
    Unsatisfiable(String),
    #[error("non-finite gradient for feature {feature:?} at step {step}")]
    NonFiniteGradient { feature: String, step: u64 },
    #[error("non-finite {what} for feature {feature:?}")]
    NonFiniteParameter { what: &'static str, feature: String },
    #[error("query vector is zero")]
    ZeroVector,
    #[error("feature list is empty")]
    EmptyFeatures,
    #[error("invalid weights: {0}")]
    Weights(String),
}
