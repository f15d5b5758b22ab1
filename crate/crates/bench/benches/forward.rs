use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use elastiscat::forward::{assemble_single, simulate, solve_single};
use elastiscat::special::{bessel01, hankel1};
use elastiscat::Scene;
use elastiscat_bench::{apple, medium, wave};

fn assembly(c: &mut Criterion) {
    let (m, shape) = (medium(), apple());
    let mut group = c.benchmark_group("assemble");
    for n in [32, 64, 128] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| assemble_single(black_box(&shape), &m, n))
        });
    }
    group.finish();
}

fn solve(c: &mut Criterion) {
    let (m, w, shape) = (medium(), wave(), apple());
    let mut group = c.benchmark_group("solve");
    for n in [32, 64, 128] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| solve_single(black_box(&shape), &m, &w, n).unwrap())
        });
    }
    group.finish();
    c.bench_function("far field n=64 n_bar=32", |b| {
        b.iter(|| simulate(Scene::single(black_box(&shape)), &m, &w, 64, 32).unwrap())
    });
}

fn bessel(c: &mut Criterion) {
    c.bench_function("bessel01 small", |b| b.iter(|| bessel01(black_box(1.7))));
    c.bench_function("bessel01 large", |b| b.iter(|| bessel01(black_box(37.0))));
    c.bench_function("hankel1 order 5", |b| b.iter(|| hankel1(5, black_box(3.2)).unwrap()));
}

criterion_group!(benches, assembly, solve, bessel);
criterion_main!(benches);
