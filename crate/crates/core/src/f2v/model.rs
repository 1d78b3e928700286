use std::sync::Arc;

use ndarray::{Array2, ArrayView1};
use rand::Rng;

use super::{F2vConfig, F2vError};
use crate::corpus::{EmbeddingMatrix, PropertyNorms, Vocabulary};
use crate::rng::seeded_rng;

/// Adam moments for the feature matrix plus the global step counter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Array2<f64>,
    pub v: Array2<f64>,
    pub t: u64,
}

impl AdamState {
    pub fn zeros(rows: usize, dim: usize) -> Self {
        Self {
            m: Array2::zeros((rows, dim)),
            v: Array2::zeros((rows, dim)),
            t: 0,
        }
    }
}

/// Learned feature embeddings living in a frozen word space.
///
/// `words` holds one row per norm concept; it is shared and never mutated.
#[derive(Debug, Clone, PartialEq)]
pub struct F2vModel {
    pub(crate) features: Vocabulary,
    pub(crate) embeddings: Array2<f64>,
    pub(crate) words: Arc<EmbeddingMatrix>,
    pub(crate) config: F2vConfig,
    pub(crate) adam: AdamState,
}

impl F2vModel {
    /// Reassembles a model from its parts, checking shapes and finiteness.
    pub fn from_parts(
        features: Vocabulary,
        embeddings: Array2<f64>,
        words: Arc<EmbeddingMatrix>,
        config: F2vConfig,
        adam: AdamState,
    ) -> Result<Self, F2vError> {
        config.validate()?;
        let shape = (features.len(), config.dim);
        if embeddings.dim() != shape || adam.m.dim() != shape || adam.v.dim() != shape {
            return Err(F2vError::Shape(format!(
                "feature matrix {:?}, moments {:?}/{:?}, expected {:?}",
                embeddings.dim(),
                adam.m.dim(),
                adam.v.dim(),
                shape
            )));
        }
        if words.dim() != config.dim {
            return Err(F2vError::DimensionMismatch {
                config: config.dim,
                words: words.dim(),
            });
        }
        let model = Self {
            features,
            embeddings,
            words,
            config,
            adam,
        };
        model.check_finite()?;
        Ok(model)
    }

    pub fn features(&self) -> &Vocabulary {
        &self.features
    }

    pub fn feature_embeddings(&self) -> &Array2<f64> {
        &self.embeddings
    }

    pub fn feature_row(&self, feature: usize) -> ArrayView1<'_, f64> {
        self.embeddings.row(feature)
    }

    /// Feature embeddings packaged with their vocabulary.
    pub fn feature_matrix(&self) -> EmbeddingMatrix {
        EmbeddingMatrix::new(self.features.clone(), self.embeddings.clone())
            .expect("model invariants guarantee a valid matrix")
    }

    pub fn words(&self) -> &Arc<EmbeddingMatrix> {
        &self.words
    }

    pub fn config(&self) -> &F2vConfig {
        &self.config
    }

    pub fn adam(&self) -> &AdamState {
        &self.adam
    }

    pub fn dim(&self) -> usize {
        self.config.dim
    }

    pub(crate) fn check_finite(&self) -> Result<(), F2vError> {
        let bad = |m: &Array2<f64>| {
            m.indexed_iter()
                .find(|(_, v)| !v.is_finite())
                .map(|(i, _)| i.0)
        };
        for (name, m) in [
            ("feature embedding", &self.embeddings),
            ("first moment", &self.adam.m),
            ("second moment", &self.adam.v),
        ] {
            if let Some(row) = bad(m) {
                return Err(F2vError::NonFiniteParameter {
                    what: name,
                    feature: self.features.token(row).to_string(),
                });
            }
        }
        Ok(())
    }
}

/// Fresh model: feature rows i.i.d. uniform on `[-init_scale, init_scale]`,
/// zeroed Adam moments.
pub fn init_model(
    norms: &PropertyNorms,
    words: Arc<EmbeddingMatrix>,
    config: &F2vConfig,
) -> Result<F2vModel, F2vError> {
    config.validate()?;
    if config.dim != words.dim() {
        return Err(F2vError::DimensionMismatch {
            config: config.dim,
            words: words.dim(),
        });
    }
    if words.len() != norms.n_concepts() {
        return Err(F2vError::Shape(format!(
            "{} word rows for {} concepts",
            words.len(),
            norms.n_concepts()
        )));
    }
    let mut rng = seeded_rng(config.seed);
    let scale = config.init_scale;
    let n = norms.n_features();
    let embeddings =
        Array2::from_shape_simple_fn((n, config.dim), || rng.random_range(-scale..=scale));
    Ok(F2vModel {
        features: norms.features().clone(),
        embeddings,
        words,
        config: config.clone(),
        adam: AdamState::zeros(n, config.dim),
    })
}
