//! Small dense helpers shared by the models and metrics.

use ndarray::ArrayView1;

/// Cosine similarity; zero when either vector is zero.
pub fn cosine(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    let na = a.dot(&a).sqrt();
    let nb = b.dot(&b).sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    a.dot(&b) / (na * nb)
}

/// Indices of `scores` sorted high to low (ties by ascending index), paired
/// with their score and truncated to `top_k`.
pub fn rank_descending(scores: &[f64], top_k: usize) -> Vec<(usize, f64)> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    // +0.0 and -0.0 must tie
    let key = |i: usize| if scores[i] == 0.0 { 0.0 } else { scores[i] };
    order.sort_by(|&a, &b| key(b).total_cmp(&key(a)).then(a.cmp(&b)));
    order.truncate(top_k);
    order.into_iter().map(|i| (i, scores[i])).collect()
}
