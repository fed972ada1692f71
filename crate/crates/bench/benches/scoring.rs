use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use eosl_bench::{captioning_items, random_items};
use eosl_core::channel::block_error_rate;
use eosl_core::fleet::reference_items;
use eosl_core::selection::{default_profiles, p_b_grid, run_rounds, score_items, sweep, ScoringContext};
use eosl_core::CumulativeParams;

fn channel(c: &mut Criterion) {
    let mut g = c.benchmark_group("block_error_rate");
    for (l, t) in [(16u64, 3u64), (12_000, 0), (12_000, 12), (1_000_000, 400_500)] {
        g.bench_with_input(BenchmarkId::from_parameter(format!("l{l}_t{t}")), &(l, t), |b, &(l, t)| {
            b.iter(|| block_error_rate(black_box(0.4), l, t))
        });
    }
    g.finish();
}

fn scoring(c: &mut Criterion) {
    let ctx = ScoringContext::default();
    let mut g = c.benchmark_group("score_items");
    for n in [10, 100] {
        let items = captioning_items(n);
        g.bench_with_input(BenchmarkId::new("captioning", n), &items, |b, items| {
            b.iter(|| score_items(items, &ctx).unwrap())
        });
    }
    let wide = random_items(7, 500);
    g.bench_function("random_500", |b| b.iter(|| score_items(&wide, &ctx).unwrap()));
    g.finish();
}

fn rounds(c: &mut Criterion) {
    let items = captioning_items(100);
    let ctx = ScoringContext::default();
    c.bench_function("run_rounds_10_25_50_100", |b| {
        b.iter(|| run_rounds(&items, &[10, 25, 50, 100], &CumulativeParams::default(), &ctx, None).unwrap())
    });
}

fn sweeps(c: &mut Criterion) {
    let items = reference_items();
    let grid = p_b_grid(1e-5, 1e-1, 50, true).unwrap();
    let profiles = default_profiles();
    c.bench_function("sweep_reference_50", |b| {
        b.iter(|| sweep(&items, &ScoringContext::default(), &grid, &profiles).unwrap())
    });
}

criterion_group!(benches, channel, scoring, rounds, sweeps);
criterion_main!(benches);
