use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use vpc_core::analysis::{per_layer_gdv, GroupingMode};
use vpc_core::corpus::clean_sentence;
use vpc_core::geometry::{gdv, LabeledCloud};
use vpc_core::linalg::Matrix;
use vpc_core::mds::{classical_mds, pairwise_distances, smacof};
use vpc_core::synthetic::{layer_trend_bundle, LayerTrendConfig};

/// Deterministic pseudo-random matrix without pulling an RNG into the bench.
fn points(n: usize, d: usize) -> Matrix {
    let mut state = 0x9e37_79b9_7f4a_7c15u64;
    let data = (0..n * d)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 10.0 - 5.0
        })
        .collect();
    Matrix::from_row_major(n, d, data).unwrap()
}

fn bench_gdv(c: &mut Criterion) {
    let mut group = c.benchmark_group("gdv");
    for (n, d) in [(100, 16), (400, 64), (1089, 768)] {
        let labels: Vec<String> = (0..n).map(|i| format!("c{}", i % 11)).collect();
        let cloud = LabeledCloud::new(points(n, d), labels).unwrap();
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{n}x{d}")),
            &cloud,
            |b, cloud| b.iter(|| gdv(black_box(cloud)).unwrap()),
        );
    }
    group.finish();
}

fn bench_mds(c: &mut Criterion) {
    let mut group = c.benchmark_group("classical_mds");
    for n in [50, 200, 500] {
        let dist = pairwise_distances(&points(n, 32)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &dist, |b, dist| {
            b.iter(|| classical_mds(black_box(dist), 2).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("smacof");
    for n in [50, 200] {
        let dist = pairwise_distances(&points(n, 32)).unwrap();
        let init = classical_mds(&dist, 2).unwrap().coordinates;
        group.bench_with_input(BenchmarkId::from_parameter(n), &dist, |b, dist| {
            b.iter(|| smacof(black_box(dist), &init, 100, 1e-9).unwrap())
        });
    }
    group.finish();
}

fn bench_pipeline(c: &mut Criterion) {
    let bundle = layer_trend_bundle(&LayerTrendConfig::default());
    c.bench_function("per_layer_gdv/synthetic_12_layers", |b| {
        b.iter(|| per_layer_gdv(black_box(&bundle), GroupingMode::ByConstructionAll).unwrap())
    });
}

fn bench_cleaning(c: &mut Criterion) {
    let text =
        "The Minister, having  considered it, AGREED to give up (reluctantly) -- and came back!  "
            .repeat(20);
    c.bench_function("clean_sentence/1.8kB", |b| {
        b.iter(|| clean_sentence(black_box(&text)))
    });
}

criterion_group!(
    benches,
    bench_gdv,
    bench_mds,
    bench_pipeline,
    bench_cleaning
);
criterion_main!(benches);
