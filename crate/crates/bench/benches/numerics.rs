use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use krigkit::kernels::corr_matrix;
use krigkit::linalg::{cholesky, svd};
use krigkit::localgp::predict_local;
use krigkit::seqdesign::expected_improvement;
use krigkit::{fit, lhd, BigDataset, CorrelationSpec, FitOptions};

fn surface(x: &[f64]) -> f64 {
    x.iter().map(|v| (3.0 * v).sin()).sum()
}

fn decompositions(c: &mut Criterion) {
    let mut g = c.benchmark_group("decompose");
    let spec = CorrelationSpec::gaussian(vec![1.0; 2]).unwrap();
    for n in [25, 50, 100, 200] {
        let r = corr_matrix(&spec, &lhd(n, 2, 1).unwrap()).unwrap().with_nugget(1e-6);
        g.bench_with_input(BenchmarkId::new("cholesky", n), &r, |b, r| b.iter(|| cholesky(black_box(r)).unwrap()));
        g.bench_with_input(BenchmarkId::new("svd", n), &r, |b, r| b.iter(|| svd(black_box(r)).unwrap()));
    }
    g.finish();
}

fn fitting(c: &mut Criterion) {
    let mut g = c.benchmark_group("fit");
    g.sample_size(10);
    let spec = CorrelationSpec::power_exponential(vec![0.0; 2], 1.95).unwrap();
    for n in [20, 50] {
        let x = lhd(n, 2, 2).unwrap();
        let y: Vec<f64> = x.rows().map(surface).collect();
        g.bench_function(BenchmarkId::from_parameter(n), |b| {
            b.iter(|| fit(&x, &y, &spec, &FitOptions::default()).unwrap())
        });
    }
    g.finish();
}

fn prediction(c: &mut Criterion) {
    let spec = CorrelationSpec::power_exponential(vec![0.0; 2], 1.95).unwrap();
    let x = lhd(50, 2, 3).unwrap();
    let y: Vec<f64> = x.rows().map(surface).collect();
    let model = fit(&x, &y, &spec, &FitOptions::default()).unwrap();
    c.bench_function("predict/50", |b| b.iter(|| model.predict(black_box(&[0.3, 0.7]), 1).unwrap()));

    let big = lhd(5000, 2, 4).unwrap();
    let yb: Vec<f64> = big.rows().map(surface).collect();
    let data = BigDataset::new(big, yb).unwrap();
    let opts = FitOptions::local_default();
    let mut g = c.benchmark_group("localgp");
    g.sample_size(10);
    g.bench_function("5000/n30", |b| {
        b.iter(|| predict_local(&data, black_box(&[0.4, 0.6]), 30, &spec, &opts).unwrap())
    });
    g.finish();

    c.bench_function("expected_improvement", |b| {
        b.iter(|| expected_improvement(black_box(0.2), black_box(0.5), black_box(0.1)))
    });
}

criterion_group!(benches, decompositions, fitting, prediction);
criterion_main!(benches);
