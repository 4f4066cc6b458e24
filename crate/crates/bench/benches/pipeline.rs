use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use multibag::resampling::rng_from_seed;
use multibag::{
    bh_reject, p_value_two_sided, run_bagging, test_dataset, AggregationRule, BaggingConfig, Scheme,
    SimulationDesign, TestConfig,
};
use rand::Rng;

fn p_values(c: &mut Criterion) {
    let mut group = c.benchmark_group("p_value_two_sided");
    for df in [1.0, 18.0, 200.0] {
        group.bench_with_input(BenchmarkId::from_parameter(df), &df, |b, &df| {
            b.iter(|| p_value_two_sided(black_box(2.3), black_box(df)).unwrap())
        });
    }
    group.finish();
}

fn bh(c: &mut Criterion) {
    let mut rng = rng_from_seed(1);
    let mut group = c.benchmark_group("bh_reject");
    for n in [1_000usize, 20_000] {
        let p: Vec<f64> = (0..n).map(|_| rng.random::<f64>().powi(3)).collect();
        group.bench_with_input(BenchmarkId::from_parameter(n), &p, |b, p| {
            b.iter(|| bh_reject(black_box(p), 0.05).unwrap())
        });
    }
    group.finish();
}

fn pipeline(c: &mut Criterion) {
    let design = SimulationDesign::reference();
    let (data, _) = multibag::generate_dataset(&design, &mut rng_from_seed(7)).unwrap();
    let test = TestConfig::pooled(0.05).unwrap();
    c.bench_function("test_dataset/1000x(10+10)", |b| {
        b.iter(|| test_dataset(black_box(&data), &test).unwrap())
    });

    let mut group = c.benchmark_group("run_bagging/1000x(10+10)");
    group.sample_size(10);
    for (label, scheme) in [
        ("bagging-B50", Scheme::Bagging),
        ("subbag-random-B50", Scheme::random_subbag(0.9)),
        ("max-contrast-d1", Scheme::MaxContrast { d_x: 1, d_y: 1 }),
    ] {
        let cfg = BaggingConfig {
            test,
            scheme,
            b: 50,
            rule: AggregationRule::UNION,
            master_seed: 3,
        };
        group.bench_function(label, |b| b.iter(|| run_bagging(black_box(&data), &cfg).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, p_values, bh, pipeline);
criterion_main!(benches);
