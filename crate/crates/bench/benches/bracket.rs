use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use opbracket::poisson::{bracket, check_axioms, BracketSpec, OperationalField};
use opbracket::sample::Sampler;
use opbracket::trunc::fd_report;

fn symbolic_bracket(c: &mut Criterion) {
    let b = BracketSpec::queer_example();
    let mut s = Sampler::new(7);
    let pairs: Vec<_> = (0..32).map(|_| (s.expression(), s.expression())).collect();
    c.bench_function("bracket/queer/32 pairs", |bench| {
        bench.iter(|| {
            for (f, g) in &pairs {
                black_box(bracket(&b, f, g));
            }
        })
    });
}

fn axioms(c: &mut Criterion) {
    let queer = BracketSpec::queer_example();
    let canonical = BracketSpec::new(OperationalField::unit(1), OperationalField::unit(2)).unwrap();
    let mut group = c.benchmark_group("check_axioms/10 trials");
    group.sample_size(10);
    group.bench_function("queer", |bench| {
        bench.iter(|| black_box(check_axioms(&queer, 10, 1)))
    });
    group.bench_function("canonical", |bench| {
        bench.iter(|| black_box(check_axioms(&canonical, 10, 1)))
    });
    group.finish();
}

fn finite_differences(c: &mut Criterion) {
    let mut s = Sampler::new(11);
    let (f, m) = (s.expression(), s.point());
    c.bench_function("fd_report/n=6", |bench| {
        bench.iter(|| black_box(fd_report(&f, &m, 6, 1e-4).unwrap()))
    });
}

criterion_group!(benches, symbolic_bracket, axioms, finite_differences);
criterion_main!(benches);
