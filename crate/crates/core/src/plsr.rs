//! Partial least squares regression (NIPALS, PLS2 with regression-mode
//! deflation) mapping word vectors onto production-frequency vectors.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::linalg::rank_descending;

/// Convergence threshold on the change of the weight vector.
pub const INNER_TOLERANCE: f64 = 1e-6;
pub const MAX_INNER_ITERATIONS: usize = 500;

/// Relative Frobenius norm below which a residual block counts as exhausted.
const EXHAUSTED: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum PlsrError {
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("X has {x} rows but Y has {y}")]
    RowMismatch { x: usize, y: usize },
    #[error("n_components must be in 1..={max}, got {requested}")]
    ComponentsOutOfRange { requested: usize, max: usize },
    #[error("X has no variance left after {achieved} components (requested {requested})")]
    RankDeficient { achieved: usize, requested: usize },
    #[error("input contains non-finite values")]
    NonFinite,
    #[error("expected a vector of length {expected}, got {found}")]
    Length { expected: usize, found: usize },
    #[error("inconsistent model: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlsrModel {
    x_mean: Array1<f64>,
    y_mean: Array1<f64>,
    x_weights: Array2<f64>,
    x_loadings: Array2<f64>,
    y_loadings: Array2<f64>,
    coefficients: Array2<f64>,
    inner_iterations: Vec<usize>,
    residual_ss: Vec<f64>,
}

impl PlsrModel {
    /// Reassembles a fitted model; the coefficient matrix is recomputed from
    /// the weights and loadings.
    pub fn from_parts(
        x_mean: Array1<f64>,
        y_mean: Array1<f64>,
        x_weights: Array2<f64>,
        x_loadings: Array2<f64>,
        y_loadings: Array2<f64>,
    ) -> Result<Self, PlsrError> {
        let (m, p) = x_weights.dim();
        let k = y_mean.len();
        if x_mean.len() != m || x_loadings.dim() != (m, p) || y_loadings.dim() != (k, p) {
            return Err(PlsrError::Inconsistent(format!(
                "x_mean {}, y_mean {k}, W {:?}, P {:?}, Q {:?}",
                x_mean.len(),
                x_weights.dim(),
                x_loadings.dim(),
                y_loadings.dim()
            )));
        }
        let all = [&x_weights, &x_loadings, &y_loadings];
        if all.iter().any(|a| a.iter().any(|v| !v.is_finite()))
            || x_mean.iter().chain(&y_mean).any(|v| !v.is_finite())
        {
            return Err(PlsrError::NonFinite);
        }
        let coefficients = coefficients(&x_weights, &x_loadings, &y_loadings);
        Ok(Self {
            x_mean,
            y_mean,
            x_weights,
            x_loadings,
            y_loadings,
            coefficients,
            inner_iterations: Vec::new(),
            residual_ss: Vec::new(),
        })
    }

    pub fn n_components(&self) -> usize {
        self.x_weights.ncols()
    }
    pub fn n_inputs(&self) -> usize {
        self.x_mean.len()
    }
    pub fn n_outputs(&self) -> usize {
        self.y_mean.len()
    }
    pub fn x_mean(&self) -> &Array1<f64> {
        &self.x_mean
    }
    pub fn y_mean(&self) -> &Array1<f64> {
        &self.y_mean
    }
    pub fn x_weights(&self) -> &Array2<f64> {
        &self.x_weights
    }
    pub fn x_loadings(&self) -> &Array2<f64> {
        &self.x_loadings
    }
    pub fn y_loadings(&self) -> &Array2<f64> {
        &self.y_loadings
    }
    pub fn coefficients(&self) -> &Array2<f64> {
        &self.coefficients
    }

    /// Inner-loop iterations used by each component (empty for loaded models).
    pub fn inner_iterations(&self) -> &[usize] {
        &self.inner_iterations
    }

    /// Training residual sum of squares after each component (empty for
    /// loaded models).
    pub fn residual_ss(&self) -> &[f64] {
        &self.residual_ss
    }

    /// `(x - x_mean) B + y_mean`.
    pub fn predict(&self, x: ArrayView1<'_, f64>) -> Result<Array1<f64>, PlsrError> {
        self.check_input(x)?;
        Ok((&x - &self.x_mean).dot(&self.coefficients) + &self.y_mean)
    }

    /// Row-wise [`predict`](Self::predict).
    pub fn predict_rows(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>, PlsrError> {
        if x.ncols() != self.n_inputs() {
            return Err(PlsrError::Length {
                expected: self.n_inputs(),
                found: x.ncols(),
            });
        }
        Ok((&x - &self.x_mean).dot(&self.coefficients) + &self.y_mean)
    }

    /// Restores the fit diagnostics of a reloaded model.
    pub fn with_diagnostics(mut self, inner_iterations: Vec<usize>, residual_ss: Vec<f64>) -> Self {
        self.inner_iterations = inner_iterations;
        self.residual_ss = residual_ss;
        self
    }

    /// Prediction by replaying the deflation one component at a time.
    pub fn predict_componentwise(&self, x: ArrayView1<'_, f64>) -> Result<Array1<f64>, PlsrError> {
        self.check_input(x)?;
        let mut residual = &x - &self.x_mean;
        let mut y = self.y_mean.clone();
        for a in 0..self.n_components() {
            let score = residual.dot(&self.x_weights.column(a));
            residual.scaled_add(-score, &self.x_loadings.column(a));
            y.scaled_add(score, &self.y_loadings.column(a));
        }
        Ok(y)
    }

    fn check_input(&self, x: ArrayView1<'_, f64>) -> Result<(), PlsrError> {
        if x.len() != self.n_inputs() {
            return Err(PlsrError::Length {
                expected: self.n_inputs(),
                found: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(PlsrError::NonFinite);
        }
        Ok(())
    }
}

/// Fits `n_components` PLS components of `y` on `x` (rows are samples).
/// Both blocks are mean-centred, not scaled.
pub fn fit(
    x: ArrayView2<'_, f64>,
    y: ArrayView2<'_, f64>,
    n_components: usize,
) -> Result<PlsrModel, PlsrError> {
    let (n, m) = x.dim();
    let k = y.ncols();
    if x.nrows() != y.nrows() {
        return Err(PlsrError::RowMismatch {
            x: x.nrows(),
            y: y.nrows(),
        });
    }
    if n < 2 {
        return Err(PlsrError::TooFewSamples(n));
    }
    let max = (n - 1).min(m);
    if n_components == 0 || n_components > max {
        return Err(PlsrError::ComponentsOutOfRange {
            requested: n_components,
            max,
        });
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(PlsrError::NonFinite);
    }

    let x_mean = x.mean_axis(Axis(0)).expect("n >= 2");
    let y_mean = y.mean_axis(Axis(0)).expect("n >= 2");
    let mut xr = &x - &x_mean;
    let mut yr = &y - &y_mean;
    let x_norm0 = frobenius(&xr);
    let y_norm0 = frobenius(&yr);

    let mut weights = Vec::new();
    let mut x_loadings = Vec::new();
    let mut y_loadings = Vec::new();
    let mut inner_iterations = Vec::new();
    let mut residual_ss = Vec::new();

    for a in 0..n_components {
        if frobenius(&yr) <= EXHAUSTED * y_norm0 || y_norm0 == 0.0 {
            log::warn!("Y fully explained after {a} of {n_components} components; stopping early");
            break;
        }
        if frobenius(&xr) <= EXHAUSTED * x_norm0 || x_norm0 == 0.0 {
            return Err(PlsrError::RankDeficient {
                achieved: a,
                requested: n_components,
            });
        }
        let (w, iterations) = leading_weights(&xr, &yr);
        let Some(w) = w else {
            return Err(PlsrError::RankDeficient {
                achieved: a,
                requested: n_components,
            });
        };
        if iterations == MAX_INNER_ITERATIONS {
            log::warn!(
                "component {}: inner loop hit {MAX_INNER_ITERATIONS} iterations",
                a + 1
            );
        }
        let t = xr.dot(&w);
        let tt = t.dot(&t);
        let p = xr.t().dot(&t) / tt;
        let q = yr.t().dot(&t) / tt;
        xr -= &outer(&t, &p);
        yr -= &outer(&t, &q);

        weights.push(w);
        x_loadings.push(p);
        y_loadings.push(q);
        inner_iterations.push(iterations);
        residual_ss.push(yr.iter().map(|v| v * v).sum());
    }

    let x_weights = columns(&weights, m);
    let x_loadings = columns(&x_loadings, m);
    let y_loadings = columns(&y_loadings, k);
    let coefficients = coefficients(&x_weights, &x_loadings, &y_loadings);
    Ok(PlsrModel {
        x_mean,
        y_mean,
        x_weights,
        x_loadings,
        y_loadings,
        coefficients,
        inner_iterations,
        residual_ss,
    })
}

/// NIPALS inner loop: alternates X- and Y-side projections starting from the
/// highest-variance Y column. Returns `None` when X carries no signal along
/// the current Y scores.
fn leading_weights(xr: &Array2<f64>, yr: &Array2<f64>) -> (Option<Array1<f64>>, usize) {
    let start = yr
        .columns()
        .into_iter()
        .map(|c| c.dot(&c))
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (j, v)| {
            if v > best.1 {
                (j, v)
            } else {
                best
            }
        })
        .0;
    let mut u = yr.column(start).to_owned();
    let mut w_old: Option<Array1<f64>> = None;
    for iteration in 1..=MAX_INNER_ITERATIONS {
        let mut w = xr.t().dot(&u);
        let norm = w.dot(&w).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return (None, iteration);
        }
        w /= norm;
        let converged = w_old.as_ref().is_some_and(|old| {
            let d = &w - old;
            d.dot(&d).sqrt() < INNER_TOLERANCE
        });
        if converged || yr.ncols() == 1 {
            return (Some(w), iteration);
        }
        let t = xr.dot(&w);
        let c = yr.t().dot(&t) / t.dot(&t);
        let cc = c.dot(&c);
        if cc == 0.0 {
            return (Some(w), iteration);
        }
        u = yr.dot(&c) / cc;
        w_old = Some(w);
    }
    (w_old, MAX_INNER_ITERATIONS)
}

/// `B = R Q^T` with rotations `r_a = w_a - sum_{b<a} (p_b . w_a) r_b`, so that
/// the component scores are `t_a = x_centred . r_a`.
fn coefficients(w: &Array2<f64>, p: &Array2<f64>, q: &Array2<f64>) -> Array2<f64> {
    let (m, n_comp) = w.dim();
    let mut r = Array2::<f64>::zeros((m, n_comp));
    for a in 0..n_comp {
        let wa = w.column(a);
        let mut ra = wa.to_owned();
        for b in 0..a {
            let coef = p.column(b).dot(&wa);
            ra.scaled_add(-coef, &r.column(b));
        }
        r.column_mut(a).assign(&ra);
    }
    r.dot(&q.t())
}

fn frobenius(a: &Array2<f64>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn outer(a: &Array1<f64>, b: &Array1<f64>) -> Array2<f64> {
    let a2 = a.view().insert_axis(Axis(1));
    let b2 = b.view().insert_axis(Axis(0));
    a2.dot(&b2)
}

fn columns(cols: &[Array1<f64>], rows: usize) -> Array2<f64> {
    let mut out = Array2::zeros((rows, cols.len()));
    for (j, c) in cols.iter().enumerate() {
        out.column_mut(j).assign(c);
    }
    out
}

/// Indices of the `top_k` largest predicted weights, ties by ascending index.
pub fn top_k_features_from_prediction(y_hat: ArrayView1<'_, f64>, top_k: usize) -> Vec<usize> {
    let scores: Vec<f64> = y_hat.to_vec();
    rank_descending(&scores, top_k)
        .into_iter()
        .map(|(i, _)| i)
        .collect()
}
