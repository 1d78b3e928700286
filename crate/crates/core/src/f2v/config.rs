use serde::{Deserialize, Serialize};

use super::F2vError;

/// Training hyperparameters. Defaults follow the standard setup where one
/// exists (lr 0.001, 120 epochs, 20 negatives per positive).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct F2vConfig {
    pub dim: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub negative_rate: usize,
    pub batch_size: usize,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub init_scale: f64,
    pub seed: u64,
}

impl F2vConfig {
    pub const DEFAULT_LEARNING_RATE: f64 = 0.001;
    pub const DEFAULT_EPOCHS: usize = 120;
    pub const DEFAULT_NEGATIVE_RATE: usize = 20;
    pub const DEFAULT_BATCH_SIZE: usize = 128;

    /// Default configuration for `dim`-dimensional word vectors.
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            learning_rate: Self::DEFAULT_LEARNING_RATE,
            epochs: Self::DEFAULT_EPOCHS,
            negative_rate: Self::DEFAULT_NEGATIVE_RATE,
            batch_size: Self::DEFAULT_BATCH_SIZE,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
            init_scale: 0.5 / dim.max(1) as f64,
            seed: 42,
        }
    }

    pub fn validate(&self) -> Result<(), F2vError> {
        let bad = |msg: &str| Err(F2vError::Config(msg.to_string()));
        if self.dim == 0 {
            return bad("dim must be positive");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if !(self.adam_beta1 > 0.0 && self.adam_beta1 < 1.0) {
            return bad("adam_beta1 must lie in (0, 1)");
        }
        if !(self.adam_beta2 > 0.0 && self.adam_beta2 < 1.0) {
            return bad("adam_beta2 must lie in (0, 1)");
        }
        if !(self.adam_epsilon > 0.0 && self.adam_epsilon.is_finite()) {
            return bad("adam_epsilon must be positive");
        }
        if !(self.init_scale > 0.0 && self.init_scale.is_finite()) {
            return bad("init_scale must be positive");
        }
        if self.negative_rate == 0 {
            return bad("negative_rate must be at least 1");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be positive");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = F2vConfig::new(300);
        assert_eq!(c.learning_rate, 0.001);
        assert_eq!(c.epochs, 120);
        assert_eq!(c.negative_rate, 20);
        assert_eq!(c.batch_size, 128);
        assert_eq!(c.init_scale, 1.0 / 600.0);
        c.validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let mut c = F2vConfig::new(4);
        c.adam_beta1 = 1.0;
        assert!(c.validate().is_err());
        let mut c = F2vConfig::new(4);
        c.negative_rate = 0;
        assert!(c.validate().is_err());
        let mut c = F2vConfig::new(4);
        c.learning_rate = -1.0;
        assert!(c.validate().is_err());
    }
}
