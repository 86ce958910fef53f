//! Rayon thread pool against a single-thread pool on the three hot paths.
//!
//! Built without the `parallel` feature both arms run the sequential code,
//! which is the way to measure the fallback itself:
//! `cargo bench -p momentum-core --no-default-features`.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use momentum_core::ingest::FeatureTable;
use momentum_core::logreg::{fit, gradient, TrainConfig};
use momentum_core::stats::correlation_from_columns;
use momentum_core::synth::{generate_many, SynthConfig};
use momentum_core::topsis::{momentum_series_all, WeightVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::ThreadPool;

fn pools() -> [(&'static str, ThreadPool); 2] {
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let all = rayon::ThreadPoolBuilder::new().build().unwrap();
    [("sequential", single), ("parallel", all)]
}

fn logistic_table(rows: usize, cols: usize) -> (FeatureTable, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let columns: Vec<Vec<f64>> = (0..cols)
        .map(|_| (0..rows).map(|_| rng.random_range(-2.0..2.0)).collect())
        .collect();
    let y = (0..rows)
        .map(|i| {
            f64::from(u8::from(rng.random_bool(if columns[0][i] > 0.0 {
                0.7
            } else {
                0.3
            })))
        })
        .collect();
    let names = (0..cols).map(|j| format!("x{j}")).collect();
    (FeatureTable::from_columns(names, columns).unwrap(), y)
}

fn bench_momentum(c: &mut Criterion) {
    let configs: Vec<SynthConfig> = (0..32)
        .map(|i| SynthConfig {
            seed: i,
            match_id: format!("m{i:02}"),
            ..SynthConfig::default()
        })
        .collect();
    let ds = generate_many(&configs);
    let w = WeightVector::momentum_default();
    let mut group = c.benchmark_group("momentum_series_32_matches");
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| momentum_series_all(&ds, &w)))
        });
    }
    group.finish();
}

fn bench_logreg(c: &mut Criterion) {
    let mut group = c.benchmark_group("logreg");
    group.sample_size(20);
    for rows in [10_000, 100_000] {
        let (x, y) = logistic_table(rows, 8);
        let theta = vec![0.1; 9];
        for (name, pool) in pools() {
            group.bench_with_input(
                BenchmarkId::new(format!("gradient/{name}"), rows),
                &rows,
                |b, _| b.iter(|| pool.install(|| gradient(&theta, &x, &y).unwrap())),
            );
        }
    }
    let (x, y) = logistic_table(20_000, 8);
    let config = TrainConfig {
        max_iter: 200,
        ..TrainConfig::default()
    };
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new("fit_200_iter", name), |b| {
            b.iter(|| pool.install(|| fit(&x, &y, &config).unwrap()))
        });
    }
    group.finish();
}

fn bench_correlation(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let k = 16;
    let names: Vec<String> = (0..k).map(|j| format!("v{j}")).collect();
    let columns: Vec<Vec<f64>> = (0..k)
        .map(|_| (0..5_000).map(|_| rng.random_range(0.0..1.0)).collect())
        .collect();
    let mut group = c.benchmark_group("spearman_matrix_16x5000");
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| correlation_from_columns(&names, &columns, "v0").unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_momentum, bench_logreg, bench_correlation);
criterion_main!(benches);
