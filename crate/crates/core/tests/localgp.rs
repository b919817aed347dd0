use krigkit::localgp::{knn_neighborhood, predict_local, predict_local_batch};
use krigkit::{fit, lhd, BigDataset, CorrelationSpec, Design, FitOptions};
use proptest::prelude::*;

fn smooth(x: &[f64]) -> f64 {
    (3.0 * x[0]).sin() + (2.0 * x[1]).cos() * x[0]
}

fn dataset(n: usize, seed: u64) -> BigDataset {
    let x = lhd(n, 2, seed).unwrap();
    let y = x.rows().map(smooth).collect();
    BigDataset::new(x, y).unwrap()
}

fn spec() -> CorrelationSpec {
    CorrelationSpec::power_exponential(vec![0.0; 2], 1.95).unwrap()
}

#[test]
fn full_neighbourhood_is_the_full_fit() {
    let data = dataset(30, 1);
    let opts = FitOptions::local_default().with_seed(9);
    let full = fit(data.x(), data.y(), &spec(), &opts).unwrap();
    for x0 in lhd(10, 2, 2).unwrap().rows() {
        let local = predict_local(&data, x0, 30, &spec(), &opts).unwrap();
        let global = full.predict(x0, 1).unwrap();
        assert_eq!(local.mean.to_bits(), global.mean.to_bits());
        assert_eq!(local.variance.to_bits(), global.variance.to_bits());
    }
}

#[test]
fn interpolates_at_training_points() {
    let data = dataset(200, 3);
    let opts = FitOptions::local_default();
    for i in [0, 57, 199] {
        let x0 = data.x().row(i).to_vec();
        let p = predict_local(&data, &x0, 20, &spec(), &opts).unwrap();
        assert!((p.mean - data.y()[i]).abs() < 1e-6);
    }
}

#[test]
fn batch_is_independent_of_worker_count() {
    let data = dataset(400, 4);
    let points = lhd(12, 2, 5).unwrap().to_rows();
    let opts = FitOptions::local_default().with_seed(3);
    let one = predict_local_batch(&data, &points, 25, &spec(), &opts, 1).unwrap();
    let many = predict_local_batch(&data, &points, 25, &spec(), &opts, 8).unwrap();
    for (a, b) in one.iter().zip(&many) {
        let (a, b) = (a.as_ref().unwrap(), b.as_ref().unwrap());
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.variance.to_bits(), b.variance.to_bits());
    }
}

#[test]
fn batch_reports_errors_per_point() {
    let data = dataset(20, 6);
    let points = vec![vec![0.5, 0.5], vec![0.5], vec![0.1, 0.9]];
    let out = predict_local_batch(&data, &points, 5, &spec(), &FitOptions::local_default(), 2).unwrap();
    assert!(out[0].is_ok() && out[1].is_err() && out[2].is_ok());
}

#[test]
fn local_accuracy_is_comparable_to_a_subsampled_full_fit() {
    let data = dataset(2000, 7);
    let tests = lhd(100, 2, 8).unwrap();
    let truth: Vec<f64> = tests.rows().map(smooth).collect();
    let opts = FitOptions::local_default();
    let local = predict_local_batch(&data, &tests.to_rows(), 50, &spec(), &opts, 1).unwrap();
    let sub: Vec<usize> = (0..2000).step_by(10).collect();
    let xs = data.x().subset(&sub);
    let ys: Vec<f64> = sub.iter().map(|&i| data.y()[i]).collect();
    let full = fit(&xs, &ys, &spec(), &FitOptions::default()).unwrap();
    let rmse = |pred: &dyn Fn(usize) -> f64| {
        ((0..100).map(|i| (pred(i) - truth[i]).powi(2)).sum::<f64>() / 100.0).sqrt()
    };
    let r_local = rmse(&|i| local[i].as_ref().unwrap().mean);
    let r_full = rmse(&|i| full.predict(tests.row(i), 1).unwrap().mean);
    assert!(r_local <= 2.0 * r_full.max(1e-9), "local {r_local:e} vs full {r_full:e}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn neighbourhoods_are_nested(seed in 0u64..1000, q0 in 0.0f64..1.0, q1 in 0.0f64..1.0, n in 1usize..40) {
        let data = dataset(60, seed);
        let a = knn_neighborhood(&data, &[q0, q1], n).unwrap();
        let b = knn_neighborhood(&data, &[q0, q1], n + 1).unwrap();
        prop_assert!(a.iter().all(|i| b.contains(i)));
    }

    #[test]
    fn neighbourhoods_follow_row_permutations(seed in 0u64..1000, q0 in 0.0f64..1.0, q1 in 0.0f64..1.0, n in 1usize..20) {
        let data = dataset(40, seed);
        let perm: Vec<usize> = (0..40).map(|i| (i * 7 + 3) % 40).collect();
        let px = data.x().subset(&perm);
        let py = perm.iter().map(|&i| data.y()[i]).collect();
        let permuted = BigDataset::new(px, py).unwrap();
        let mut a: Vec<Vec<f64>> = knn_neighborhood(&data, &[q0, q1], n).unwrap().iter().map(|&i| data.x().row(i).to_vec()).collect();
        let mut b: Vec<Vec<f64>> = knn_neighborhood(&permuted, &[q0, q1], n).unwrap().iter().map(|&i| permuted.x().row(i).to_vec()).collect();
        a.sort_by(|u, v| u.partial_cmp(v).unwrap());
        b.sort_by(|u, v| u.partial_cmp(v).unwrap());
        prop_assert_eq!(a, b);
    }
}

#[test]
fn exact_training_point_neighbour() {
    let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64 / 9.0, 0.5]).collect();
    let data = BigDataset::new(Design::from_rows(&rows).unwrap(), vec![0.0; 10]).unwrap();
    assert_eq!(knn_neighborhood(&data, &rows[4], 1).unwrap(), vec![4]);
}
