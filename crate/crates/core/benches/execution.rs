use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use fogcache::optimizer::optimize;
use fogcache::sim::monte_carlo;
use fogcache::{Execution, PlacementParams, PopularityDist, SystemConfig};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn bench_optimize(c: &mut Criterion) {
    let cfg = SystemConfig::default();
    let dist = PopularityDist::zipf(cfg.files, cfg.alpha).unwrap();
    let mut group = c.benchmark_group("optimize");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| optimize(black_box(&cfg), &dist, exec).unwrap())
        });
    }
    group.finish();
}

fn bench_monte_carlo(c: &mut Criterion) {
    // Smaller files than the default keep one iteration well under a second.
    let cfg = SystemConfig {
        file_symbols: 10_000,
        ..SystemConfig::default()
    };
    let dist = PopularityDist::zipf(cfg.files, cfg.alpha).unwrap();
    let params = PlacementParams::new(100, 0.76).unwrap();
    let mut group = c.benchmark_group("monte_carlo_16_trials");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| monte_carlo(black_box(&cfg), &dist, params, 16, 1, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_optimize, bench_monte_carlo);
criterion_main!(benches);
