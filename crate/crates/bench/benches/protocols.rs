use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use wmdistill::bell::{two_copy_efficiency, BellScenario};
use wmdistill::channels::{AdParams, NrwmParams};
use wmdistill::multipartite::{asymptotic_ratio, optimal_w, DEFAULT_EPSILON};
use wmdistill::oracle::validate_w_round;
use wmdistill::sweep::{figure_preset, run_sweep};

fn closed_forms(c: &mut Criterion) {
    c.bench_function("two_copy_grid_100x100", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for i in 0..100 {
                for j in 0..100 {
                    let s = BellScenario::symmetric(i as f64 * 0.0099, j as f64 * 0.0099).unwrap();
                    acc += two_copy_efficiency(&s, 10).unwrap().cumulative;
                }
            }
            black_box(acc)
        })
    });
    let d = AdParams::new(0.2).unwrap();
    c.bench_function("optimal_w_n3", |b| {
        b.iter(|| optimal_w(3, black_box(d), DEFAULT_EPSILON).unwrap())
    });
    let w = NrwmParams::new(0.5).unwrap();
    c.bench_function("asymptotic_ratio", |b| {
        b.iter(|| asymptotic_ratio(3, black_box(d), black_box(w)).unwrap())
    });
}

fn oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracle");
    g.sample_size(10);
    let (d, w) = (AdParams::new(0.2).unwrap(), NrwmParams::new(0.3).unwrap());
    for n in [3usize, 5] {
        g.bench_function(format!("w_round_n{n}"), |b| {
            b.iter(|| validate_w_round(n, d, w).unwrap())
        });
    }
    g.finish();
}

fn sweeps(c: &mut Criterion) {
    let mut g = c.benchmark_group("sweep");
    g.sample_size(10);
    let cfg = figure_preset("6").unwrap();
    g.bench_function("figure_6", |b| b.iter(|| run_sweep(&cfg).unwrap()));
    g.finish();
}

criterion_group!(benches, closed_forms, oracle, sweeps);
criterion_main!(benches);
