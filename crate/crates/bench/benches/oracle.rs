use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use nhjc_bench::generic_model;
use nhjc_core::oracle::{sector_residuals, DEFAULT_CUTOFF};
use nhjc_core::{biorthogonality_check, build_full_h};

fn assembly(c: &mut Criterion) {
    let (gmm, p, rep) = generic_model();
    c.bench_function("build_full_h M=128", |b| {
        b.iter(|| build_full_h(black_box(&gmm), &p, &rep, DEFAULT_CUTOFF).unwrap())
    });
}

fn checks(c: &mut Criterion) {
    let (gmm, p, rep) = generic_model();
    let tm = build_full_h(&gmm, &p, &rep, DEFAULT_CUTOFF).unwrap();
    c.bench_function("sector_residuals n<=100", |b| {
        b.iter(|| sector_residuals(black_box(&tm), 100).unwrap())
    });
    c.bench_function("biorthogonality n<=20", |b| {
        b.iter(|| biorthogonality_check(black_box(&tm), 20).unwrap())
    });
}

criterion_group!(
    name = oracle;
    config = Criterion::default().sample_size(10).configure_from_args();
    targets = assembly, checks
);
criterion_main!(oracle);
