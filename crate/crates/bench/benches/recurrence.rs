use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use pentarec::critical::{check_k_invariants, oracle_equivalence, product_limit};
use pentarec::engine::{simulate, transforms};
use pentarec::model::{Params, PositiveReal, SeedValues};
use pentarec::number::ArithmeticMode;

fn orbits(c: &mut Criterion) {
    let params = Params::new(0.5, 1.0, 0.5, 1.0).unwrap();
    let seeds = SeedValues::new([1.0, 2.0, 0.5, 1.5, 1.0]).unwrap();
    c.bench_function("simulate double 1000", |b| {
        b.iter(|| simulate(black_box(&params), &seeds, 1000, ArithmeticMode::double()).unwrap())
    });
    c.bench_function("simulate float256 1000", |b| {
        b.iter(|| simulate(black_box(&params), &seeds, 1000, ArithmeticMode::float(256)).unwrap())
    });
    c.bench_function("simulate exact 30", |b| {
        b.iter(|| simulate(black_box(&params), &seeds, 30, ArithmeticMode::exact()).unwrap())
    });
    let traj = simulate(&params, &seeds, 1000, ArithmeticMode::double()).unwrap();
    c.bench_function("transforms 1000", |b| {
        b.iter(|| transforms(black_box(&traj)).unwrap())
    });
}

fn critical(c: &mut Criterion) {
    c.bench_function("product_limit 1e-12", |b| {
        b.iter(|| product_limit(black_box(0.5), 1e-12).unwrap())
    });
    let mu = PositiveReal::ratio("mu", 7, 3).unwrap();
    c.bench_function("oracle_equivalence 20", |b| {
        b.iter(|| oracle_equivalence(black_box(mu.exact()), 20).unwrap())
    });
    c.bench_function("k invariants 100", |b| {
        b.iter(|| check_k_invariants(black_box(&mu), 100).unwrap())
    });
}

criterion_group!(benches, orbits, critical);
criterion_main!(benches);
