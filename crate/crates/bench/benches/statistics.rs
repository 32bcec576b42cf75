use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use vqfuse_core::evaluation::{fisher_exact, fit_logistic, srocc};
use vqfuse_core::rng::Rng;

fn bench_statistics(c: &mut Criterion) {
    let mut rng = Rng::new(11);
    let x: Vec<f64> = (0..1000).map(|_| rng.next_f64()).collect();
    let y: Vec<f64> = x.iter().map(|&v| v + 0.3 * rng.next_f64()).collect();
    let mut g = c.benchmark_group("statistics");
    g.bench_function("srocc_1000", |b| {
        b.iter(|| srocc(black_box(&x), black_box(&y)).unwrap())
    });
    let metric: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
    let mos: Vec<f64> = metric
        .iter()
        .map(|&m| 80.0 / (1.0 + (-0.8 * (m - 5.0)).exp()) + 15.0)
        .collect();
    g.bench_function("logistic_fit_200", |b| {
        b.iter(|| fit_logistic(black_box(&metric), black_box(&mos)).unwrap())
    });
    g.bench_function("fisher_exact_large", |b| {
        b.iter(|| fisher_exact(black_box([[88_239, 14_603], [86_799, 16_043]])))
    });
    g.finish();
}

criterion_group!(benches, bench_statistics);
criterion_main!(benches);
