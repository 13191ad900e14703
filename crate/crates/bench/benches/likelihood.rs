use std::hint::black_box;

use cigam::baselines::NegativeBatch;
use cigam::cigam::log_likelihood;
use cigam::sampler::sample_hypergraph;
use cigam::{LayerConfig, ModelParams, OrderRange, PartitionStats, RngStream};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn params() -> ModelParams {
    let layers = LayerConfig::new(vec![0.5, 1.0]).unwrap();
    ModelParams::new(1.1, vec![8.0, 64.0], layers).unwrap()
}

fn graph_orders() -> OrderRange {
    OrderRange::new(2, 2).unwrap()
}

fn sampling(c: &mut Criterion) {
    let p = params();
    let mut group = c.benchmark_group("sample");
    for n in [1_000usize, 10_000] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| sample_hypergraph(black_box(n), &p, graph_orders(), 7).unwrap())
        });
    }
    group.finish();
}

fn statistics_and_likelihood(c: &mut Criterion) {
    let p = params();
    let mut group = c.benchmark_group("likelihood");
    for n in [1_000usize, 10_000] {
        let s = sample_hypergraph(n, &p, graph_orders(), 7).unwrap();
        group.bench_with_input(BenchmarkId::new("stats", n), &s, |b, s| {
            b.iter(|| PartitionStats::build(&s.hypergraph, &s.ranks, &p.layers, graph_orders()).unwrap())
        });
        let stats = PartitionStats::build(&s.hypergraph, &s.ranks, &p.layers, graph_orders()).unwrap();
        group.bench_with_input(BenchmarkId::new("evaluate", n), &stats, |b, stats| {
            b.iter(|| log_likelihood(black_box(stats), &p).unwrap())
        });
    }
    group.finish();
}

fn negative_sampling(c: &mut Criterion) {
    let layers = LayerConfig::new(vec![0.5, 1.0]).unwrap();
    let sparse = ModelParams::new(1.1, vec![20.0, 200.0], layers).unwrap();
    let orders = OrderRange::new(2, 3).unwrap();
    let s = sample_hypergraph(300, &sparse, orders, 3).unwrap();
    c.bench_function("negative_batch_100k", |b| {
        let mut rng = RngStream::new(1, 1).rng();
        b.iter(|| NegativeBatch::sample(&s.hypergraph, orders, 100_000, &mut rng).unwrap())
    });
}

criterion_group!(benches, sampling, statistics_and_likelihood, negative_sampling);
criterion_main!(benches);
