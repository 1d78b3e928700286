use feature2vec::plsr::{self, MAX_INNER_ITERATIONS};
use nalgebra::DMatrix;
use ndarray::{Array1, Array2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn random(rows: usize, cols: usize, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Array2::from_shape_simple_fn((rows, cols), || StandardNormal.sample(&mut rng))
}

/// Ordinary least squares with intercept via SVD, independent of the PLS path.
fn ols_predictions(x: &Array2<f64>, y: &Array2<f64>) -> Array2<f64> {
    let (n, m) = x.dim();
    let design = DMatrix::from_fn(n, m + 1, |i, j| if j == m { 1.0 } else { x[[i, j]] });
    let target = DMatrix::from_fn(n, y.ncols(), |i, j| y[[i, j]]);
    let svd = design.clone().svd(true, true);
    let coef = svd.solve(&target, 1e-12).unwrap();
    let fitted = design * coef;
    Array2::from_shape_fn(y.dim(), |(i, j)| fitted[(i, j)])
}

fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn rss(model: &plsr::PlsrModel, x: &Array2<f64>, y: &Array2<f64>) -> f64 {
    let pred = model.predict_rows(x.view()).unwrap();
    (&pred - y).mapv(|v| v * v).sum()
}

#[test]
fn one_column_matches_ols() {
    let x = ndarray::array![[1.0], [2.0], [3.0]];
    let y = &x * 2.0;
    let model = plsr::fit(x.view(), y.view(), 1).unwrap();
    let pred = model.predict_rows(x.view()).unwrap();
    assert!(max_abs_diff(&pred, &y) <= 1e-10);
    assert!(max_abs_diff(&pred, &ols_predictions(&x, &y)) <= 1e-10);
}

#[test]
fn full_rank_noiseless_recovery() {
    let x = random(20, 5, 1);
    let b0 = random(5, 3, 2);
    let y = x.dot(&b0);
    let model = plsr::fit(x.view(), y.view(), 5).unwrap();
    let pred = model.predict_rows(x.view()).unwrap();
    assert!(
        max_abs_diff(&pred, &y) < 1e-8,
        "{}",
        max_abs_diff(&pred, &y)
    );
    assert!(max_abs_diff(&pred, &ols_predictions(&x, &y)) < 1e-8);
    for i in 0..20 {
        let row = model.predict(x.row(i)).unwrap();
        for j in 0..3 {
            assert!((row[j] - y[[i, j]]).abs() < 1e-8);
        }
    }
    assert!(model
        .inner_iterations()
        .iter()
        .all(|&n| n < MAX_INNER_ITERATIONS));
}

#[test]
fn coefficients_match_componentwise_prediction() {
    let x = random(30, 8, 3);
    let y = random(30, 6, 4);
    let model = plsr::fit(x.view(), y.view(), 6).unwrap();
    let probe = random(10, 8, 5);
    for row in probe.rows() {
        let a = model.predict(row).unwrap();
        let b = model.predict_componentwise(row).unwrap();
        for (u, v) in a.iter().zip(b.iter()) {
            assert!((u - v).abs() <= 1e-10, "{u} vs {v}");
        }
    }
}

#[test]
fn residual_is_non_increasing_in_components() {
    let x = random(40, 10, 6);
    let noise = random(40, 4, 7) * 0.3;
    let y = x.dot(&random(10, 4, 8)) + noise;
    let mut last = f64::INFINITY;
    for p in 1..=10 {
        let model = plsr::fit(x.view(), y.view(), p).unwrap();
        let r = rss(&model, &x, &y);
        assert!(r <= last * (1.0 + 1e-12) + 1e-12, "p={p}: {r} > {last}");
        assert!((model.residual_ss()[p - 1] - r).abs() <= 1e-8 * r.max(1.0));
        last = r;
    }
}

#[test]
fn centering_invariance() {
    let x = random(25, 6, 9);
    let y = random(25, 3, 10);
    let shift_x = Array1::from(vec![3.0, -1.0, 0.5, 10.0, -7.0, 2.0]);
    let shift_y = Array1::from(vec![100.0, -4.0, 0.25]);
    let a = plsr::fit(x.view(), y.view(), 4).unwrap();
    let b = plsr::fit((&x + &shift_x).view(), (&y + &shift_y).view(), 4).unwrap();
    let probe = random(5, 6, 11);
    for row in probe.rows() {
        let pa = a.predict(row).unwrap() + &shift_y;
        let pb = b.predict((&row + &shift_x).view()).unwrap();
        for (u, v) in pa.iter().zip(pb.iter()) {
            assert!((u - v).abs() < 1e-8);
        }
    }
}

#[test]
fn rank_sized_fit_on_rank_deficient_design() {
    // 6 columns spanning a rank-3 centred space
    let basis = random(15, 3, 12);
    let mix = random(3, 6, 13);
    let x = basis.dot(&mix);
    let y = x.dot(&random(6, 2, 14));
    let model = plsr::fit(x.view(), y.view(), 3).unwrap();
    let pred = model.predict_rows(x.view()).unwrap();
    assert!((&pred - &y).mapv(|v| v * v).sum() < 1e-8);

    // y lies in the span of x: asking for more stops once y is explained
    let early = plsr::fit(x.view(), y.view(), 5).unwrap();
    assert!(early.n_components() <= 3);
    let again = early.predict_rows(x.view()).unwrap();
    assert!((&again - &y).mapv(|v| v * v).sum() < 1e-8);

    // y outside the span: x runs out first
    let noisy = &y + &random(15, 2, 17);
    match plsr::fit(x.view(), noisy.view(), 5) {
        Err(plsr::PlsrError::RankDeficient {
            achieved: 3,
            requested: 5,
        }) => {}
        other => panic!(
            "expected rank deficiency at 3, got {:?}",
            other.map(|m| m.n_components())
        ),
    }
}

#[test]
fn predict_is_pure() {
    let x = random(12, 4, 15);
    let y = random(12, 5, 16);
    let model = plsr::fit(x.view(), y.view(), 3).unwrap();
    let a = model.predict(x.row(0)).unwrap();
    let b = model.predict(x.row(0)).unwrap();
    assert_eq!(a, b);
    assert_eq!(
        model.predict(model.x_mean().view()).unwrap(),
        model.y_mean().clone()
    );
    let _ = x.mean_axis(Axis(0));
}

#[test]
fn top_k_matches_argsort_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for trial in 0..1000 {
        let len = 1 + trial % 25;
        // coarse values so ties actually occur
        let v: Vec<f64> = (0..len)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                (z * 2.0).round() / 2.0
            })
            .collect();
        let k = 1 + trial % len;
        let mut oracle: Vec<usize> = (0..len).collect();
        // bubble sort: descending value, then ascending index
        for i in 0..len {
            for j in 0..len - 1 - i {
                let (a, b) = (oracle[j], oracle[j + 1]);
                if v[b] > v[a] || (v[b] == v[a] && b < a) {
                    oracle.swap(j, j + 1);
                }
            }
        }
        oracle.truncate(k);
        let got = plsr::top_k_features_from_prediction(Array1::from(v.clone()).view(), k);
        assert_eq!(got, oracle, "{v:?}");
    }
}
