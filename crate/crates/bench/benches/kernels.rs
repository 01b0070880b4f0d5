use criterion::{criterion_group, criterion_main, Criterion};
use entroprod_bench::{entangled_state, reference_model};
use entroprod_core::dynamics::integrate_default;
use entroprod_core::entanglement::{ree_optimize, ReeOptions};
use entroprod_core::linalg::{hermitian_eig, FactorLayout};
use entroprod_core::production::{production_series, uniform_grid};
use entroprod_core::states::random_mixed;
use std::hint::black_box;

fn eig(c: &mut Criterion) {
    let rho = random_mixed(FactorLayout::qubits(2), 3);
    c.bench_function("hermitian_eig 4x4", |b| {
        b.iter(|| hermitian_eig(black_box(rho.op())))
    });
    let big = random_mixed(FactorLayout::qubits(4), 3);
    c.bench_function("hermitian_eig 16x16", |b| {
        b.iter(|| hermitian_eig(black_box(big.op())))
    });
}

fn ree(c: &mut Criterion) {
    let rho = entangled_state();
    let opts = ReeOptions::default();
    c.bench_function("ree_optimize", |b| {
        b.iter(|| ree_optimize(black_box(&rho), &opts))
    });
}

fn integrate(c: &mut Criterion) {
    let (model, rho0) = reference_model();
    let grid = uniform_grid(5.0, 200).unwrap();
    c.bench_function("integrate 200 points", |b| {
        b.iter(|| integrate_default(&model, black_box(&rho0), &grid))
    });
    c.bench_function("production_series 200 points", |b| {
        b.iter(|| production_series(&model, black_box(&rho0), &grid))
    });
}

criterion_group!(benches, eig, ree, integrate);
criterion_main!(benches);
