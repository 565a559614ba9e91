use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use coverage_bench::instance;
use coverage_core::{
    bound_report, gga, greedy_place, greedy_place_lazy, AlphaDomain, Deployment, GgaConfig, Point,
};

fn visibility(c: &mut Criterion) {
    let mut group = c.benchmark_group("visibility_cache");
    group.sample_size(10);
    for name in ["empty_60x50", "maze_60x50"] {
        let inst = instance(name, 0.12);
        group.bench_function(name, |b| b.iter(|| black_box(inst.coverage())));
    }
    group.finish();
}

fn greedy(c: &mut Criterion) {
    let mut group = c.benchmark_group("greedy");
    let inst = instance("random_obstacles_60x50", 0.12);
    let cov = inst.coverage();
    group.bench_function(BenchmarkId::new("plain", "N=10"), |b| {
        b.iter(|| greedy_place(black_box(&cov), 10).unwrap())
    });
    group.bench_function(BenchmarkId::new("lazy", "N=10"), |b| {
        b.iter(|| greedy_place_lazy(black_box(&cov), 10).unwrap())
    });
    group.finish();
}

fn bounds(c: &mut Criterion) {
    let inst = instance("wall_60x50", 0.12);
    let cov = inst.coverage();
    c.bench_function("bound_report", |b| {
        b.iter(|| bound_report(black_box(&cov), &inst.grid, 10, AlphaDomain::Feasible).unwrap())
    });
}

fn gradient(c: &mut Criterion) {
    let mut group = c.benchmark_group("gga");
    group.sample_size(10);
    let inst = instance("wall_60x50", 0.12);
    let cov = inst.coverage();
    let chosen = greedy_place_lazy(&cov, 10).unwrap().chosen;
    let pos: Vec<Point> = chosen.iter().map(|&k| cov.positions()[k]).collect();
    let dep = Deployment::uniform(&pos, inst.model, &inst.ms).unwrap();
    let cfg = GgaConfig {
        max_iterations: 5,
        ..inst.gga
    };
    group.bench_function("five_sweeps", |b| {
        b.iter(|| gga(black_box(&dep), &inst.grid, &inst.ms, &cfg).unwrap())
    });
    group.finish();
}

criterion_group!(benches, visibility, greedy, bounds, gradient);
criterion_main!(benches);
