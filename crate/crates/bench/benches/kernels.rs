//! Timings for the hot kernels at the default 40-level truncation.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use qbat_core::dynamics::{build_liouvillian, propagate, uniform_grid, DEFAULT_TOL};
use qbat_core::linalg::{expm_apply, hermitian_eig, C64};
use qbat_core::model::ModelParams;
use qbat_core::observables::{ergotropy, wigner, GridAxis, PhaseSpaceGrid};
use qbat_core::steadystate::steady_state;
use qbat_core::DensityMatrix;

fn charged_state(dim: usize) -> (qbat_core::Liouvillian, DensityMatrix) {
    let p = ModelParams {
        dim,
        ..ModelParams::default()
    };
    let l = build_liouvillian(&p).unwrap();
    let states = propagate(&l, &DensityMatrix::ground(dim), &[0.0, 10.0], DEFAULT_TOL).unwrap();
    let rho = states.last().unwrap().clone();
    (l, rho)
}

fn kernels(c: &mut Criterion) {
    let (l, rho) = charged_state(40);
    let n2 = 40 * 40;
    let x: Vec<C64> = rho.matrix().as_slice().to_vec();
    let mut y = vec![C64::new(0.0, 0.0); n2];

    c.bench_function("apply_vec N=40", |b| {
        b.iter(|| l.apply_vec(black_box(&x), &mut y))
    });
    c.bench_function("hermitian_eig N=40", |b| {
        b.iter(|| hermitian_eig(black_box(rho.matrix())).unwrap())
    });
    c.bench_function("ergotropy N=40", |b| {
        b.iter(|| ergotropy(black_box(&rho), l.battery_hamiltonian()).unwrap())
    });
    let small = build_liouvillian(&ModelParams {
        dim: 12,
        ..ModelParams::default()
    })
    .unwrap();
    let v0 = DensityMatrix::ground(12).into_matrix().as_slice().to_vec();
    c.bench_function("expm_apply N=12 t=1", |b| {
        b.iter(|| expm_apply(small.superoperator(), black_box(&v0), 1.0).unwrap())
    });
    let grid = uniform_grid(0.0, 20.0, 201).unwrap();
    c.bench_function("propagate N=40 0..20", |b| {
        b.iter(|| {
            propagate(
                &l,
                &DensityMatrix::ground(40),
                black_box(&grid),
                DEFAULT_TOL,
            )
            .unwrap()
        })
    });
    c.bench_function("steady_state N=40", |b| {
        b.iter(|| steady_state(black_box(&l)).unwrap())
    });
    let pgrid = PhaseSpaceGrid {
        re: GridAxis::new(-4.0, 4.0, 41),
        im: GridAxis::new(-4.0, 4.0, 41),
    };
    c.bench_function("wigner N=40 41x41", |b| {
        b.iter(|| wigner(black_box(&rho), &pgrid).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = kernels
}
criterion_main!(benches);
