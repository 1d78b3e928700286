use std::collections::BTreeMap;

use ndarray::Array1;

use super::{F2vError, F2vModel};

/// One Adam step over the feature rows that received a gradient in this
/// batch. Rows absent from `grads` keep their moments untouched; the step
/// counter advances once per call.
pub fn adam_update(
    model: &mut F2vModel,
    grads: &BTreeMap<usize, Array1<f64>>,
) -> Result<(), F2vError> {
    for (&feature, g) in grads {
        if feature >= model.features.len() {
            return Err(F2vError::Index(format!("feature {feature}")));
        }
        if g.len() != model.dim() {
            return Err(F2vError::Shape(format!(
                "gradient of length {} for dim {}",
                g.len(),
                model.dim()
            )));
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(F2vError::NonFiniteGradient {
                feature: model.features.token(feature).to_string(),
                step: model.adam.t + 1,
            });
        }
    }

    let cfg = &model.config;
    let (b1, b2, eps, lr) = (
        cfg.adam_beta1,
        cfg.adam_beta2,
        cfg.adam_epsilon,
        cfg.learning_rate,
    );
    model.adam.t += 1;
    let t = model.adam.t as i32;
    let bias1 = 1.0 - b1.powi(t);
    let bias2 = 1.0 - b2.powi(t);

    for (&feature, g) in grads {
        let mut m = model.adam.m.row_mut(feature);
        let mut v = model.adam.v.row_mut(feature);
        let mut w = model.embeddings.row_mut(feature);
        for j in 0..g.len() {
            m[j] = b1 * m[j] + (1.0 - b1) * g[j];
            v[j] = b2 * v[j] + (1.0 - b2) * g[j] * g[j];
            let m_hat = m[j] / bias1;
            let v_hat = v[j] / bias2;
            w[j] -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
    Ok(())
}
