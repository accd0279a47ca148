use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use dualthresh_bench::{channel_near_threshold, fixture, mixed_assignment};
use dualthresh_core::{
    cluster_partition, dual_cluster_partition, gap, gap_monte_carlo, solve_threshold, GapPolicy, NishimoriCoupling,
    SolveOptions,
};

fn partitions(c: &mut Criterion) {
    let k = NishimoriCoupling::from_value(1.2).unwrap();
    for name in ["A", "B", "E"] {
        let (cluster, _) = fixture(name);
        let d = mixed_assignment(&cluster);
        c.bench_function(&format!("cluster_partition/{name}"), |b| {
            b.iter(|| cluster_partition(black_box(&cluster), black_box(&d), k).unwrap())
        });
        c.bench_function(&format!("dual_cluster_partition/{name}"), |b| {
            b.iter(|| dual_cluster_partition(black_box(&cluster), black_box(&d), k).unwrap())
        });
    }
}

fn gaps(c: &mut Criterion) {
    let mut group = c.benchmark_group("gap");
    group.sample_size(10);
    for name in ["A", "D", "B"] {
        let (cluster, kind) = fixture(name);
        let ch = channel_near_threshold(kind);
        group.bench_function(format!("exact/{name}"), |b| {
            b.iter(|| gap(black_box(&ch), &cluster, GapPolicy::default()).unwrap())
        });
    }
    let (a, kind) = fixture("A");
    let ch = channel_near_threshold(kind);
    group.bench_function("monte_carlo/A/100k", |b| b.iter(|| gap_monte_carlo(black_box(&ch), &a, 100_000, 1).unwrap()));
    group.finish();
}

fn solves(c: &mut Criterion) {
    for name in ["SINGLE", "C", "A"] {
        let (cluster, kind) = fixture(name);
        c.bench_function(&format!("solve_threshold/{name}"), |b| {
            b.iter(|| solve_threshold(kind, black_box(&cluster), 0.2, &SolveOptions::default()).unwrap())
        });
    }
}

criterion_group!(benches, partitions, gaps, solves);
criterion_main!(benches);
