//! Library results against independent reference computations written
//! directly in this file.

use qbat_core::dynamics::{
    build_liouvillian, propagate, propagate_with, taylor_term, uniform_grid, Integrator,
    PropagateOptions,
};
use qbat_core::linalg::{expm_apply, general_eig, hermitian_eig, ComplexMatrix, C64};
use qbat_core::model::ModelParams;
use qbat_core::observables::{energy, ergotropy, wigner, GridAxis, PhaseSpaceGrid};
use qbat_core::steadystate::{max_energy, steady_state};
use qbat_core::DensityMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

mod common;
use common::{beta_rk4, brute_force_min_energy, c, random_state, vacuum_taylor_terms};

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let mut a = ComplexMatrix::zeros(n);
    for j in 0..n {
        for i in 0..=j {
            let z = if i == j {
                c(rng.gen_range(-1.0..1.0), 0.0)
            } else {
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            };
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
    }
    a
}

/// Cyclic Jacobi on a real symmetric matrix; eigenvalues ascending.
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = cs * akp - sn * akq;
                    a[k][q] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = cs * apk - sn * aqk;
                    a[q][k] = sn * apk + cs * aqk;
                }
            }
        }
    }
    let mut d: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    d.sort_by(f64::total_cmp);
    d
}

#[test]
fn hermitian_eigenvalues_match_jacobi_on_real_embedding() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [1, 2, 5, 9] {
        let a = random_hermitian(&mut rng, n);
        // [[Re, −Im], [Im, Re]] carries every eigenvalue twice.
        let mut big = vec![vec![0.0; 2 * n]; 2 * n];
        for i in 0..n {
            for j in 0..n {
                let z = a[(i, j)];
                big[i][j] = z.re;
                big[i + n][j + n] = z.re;
                big[i][j + n] = -z.im;
                big[i + n][j] = z.im;
            }
        }
        let want = jacobi_eigenvalues(big);
        let got = hermitian_eig(&a).unwrap().eigenvalues;
        for (k, g) in got.iter().enumerate() {
            assert!((g - want[2 * k]).abs() < 1e-12, "n={n} k={k}");
        }
    }
}

#[test]
fn general_eigenvalues_match_power_traces() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let n = 7;
    let a = ComplexMatrix::from_fn(n, |_, _| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let eig = general_eig(&a).unwrap();
    let mut power = ComplexMatrix::identity(n);
    for k in 1..=4 {
        power = power.matmul(&a);
        let tr = power.trace();
        let sum: C64 = eig.eigenvalues.iter().map(|l| l.powi(k)).sum();
        assert!((tr - sum).norm() < 1e-10 * (1.0 + tr.norm()), "k={k}");
    }
    for (j, l) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(j);
        let av = a.matvec(v);
        let r: f64 = av.iter().zip(v).map(|(x, y)| (x - l * y).norm_sqr()).sum();
        assert!(r.sqrt() < 1e-11);
    }
}

#[test]
fn expm_matches_normal_matrix_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let n = 6;
    // Random unitary by Gram–Schmidt.
    let mut cols: Vec<Vec<C64>> = Vec::new();
    while cols.len() < n {
        let mut v: Vec<C64> = (0..n)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        for u in &cols {
            let p: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= p * ui;
            }
        }
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= nrm);
        cols.push(v);
    }
    let u = ComplexMatrix::from_fn(n, |i, j| cols[j][i]);
    let d: Vec<C64> = (0..n)
        .map(|_| c(rng.gen_range(-2.0..0.5), rng.gen_range(-3.0..3.0)))
        .collect();
    let a = u.matmul(&ComplexMatrix::from_diag(&d)).matmul(&u.adjoint());
    let v0: Vec<C64> = (0..n).map(|k| c(k as f64, 1.0)).collect();
    for t in [0.0, 0.3, 2.0, 7.5] {
        let ed: Vec<C64> = d.iter().map(|l| (l * t).exp()).collect();
        let want = u
            .matmul(&ComplexMatrix::from_diag(&ed))
            .matmul(&u.adjoint())
            .matvec(&v0);
        let got = expm_apply(&a, &v0, t).unwrap();
        let err = got
            .iter()
            .zip(&want)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-11, "t={t} err={err}");
    }
}

fn linear_params(dim: usize) -> ModelParams {
    ModelParams {
        omega: 1.0,
        detuning: 0.1,
        chi: 0.0,
        n_s: 1.0,
        alpha: 0.5,
        gamma: 0.2,
        dim,
    }
}

#[test]
fn linear_battery_follows_coherent_amplitude() {
    let p = linear_params(50);
    let l = build_liouvillian(&p).unwrap();
    let grid = uniform_grid(0.0, 40.0, 41).unwrap();
    let states = propagate(&l, &DensityMatrix::ground(p.dim), &grid, 1e-10).unwrap();
    let betas = beta_rk4(&p, &grid);
    let hb = l.battery_hamiltonian();
    for ((rho, b), t) in states.iter().zip(&betas).zip(&grid) {
        let e = energy(rho, hb).unwrap();
        assert!((e - p.omega * b.norm_sqr()).abs() < 1e-6, "tau={t}");
        // The full state is the coherent state |β⟩.
        let coh = DensityMatrix::coherent(p.dim, *b).unwrap();
        assert!(rho.matrix().max_abs_diff(coh.matrix()) < 1e-6, "tau={t}");
    }
}

#[test]
fn linear_steady_state_is_coherent_fixed_point() {
    let p = linear_params(50);
    let l = build_liouvillian(&p).unwrap();
    let ss = steady_state(&l).unwrap();
    // Fixed point of the scalar amplitude equation.
    let beta = c(0.0, -p.alpha) / c(p.gamma / 2.0, p.detuning);
    assert!((ss.energy_ss - p.omega * beta.norm_sqr()).abs() < 1e-8);
    let coh = DensityMatrix::coherent(p.dim, beta).unwrap();
    assert!(ss.rho_ss.matrix().max_abs_diff(coh.matrix()) < 1e-8);
}

#[test]
fn linear_energy_maximum_sits_at_the_end_without_detuning() {
    let p = ModelParams {
        detuning: 0.0,
        ..linear_params(60)
    };
    let m = max_energy(&p, 30.0).unwrap();
    assert!(m.at_boundary);
    assert_eq!(m.tau_star, 30.0);
    let b = beta_rk4(&p, &[30.0])[0];
    assert!((m.energy - b.norm_sqr()).abs() < 1e-6);
}

#[test]
fn single_excitation_decays_exponentially() {
    let p = ModelParams {
        alpha: 0.0,
        gamma: 0.35,
        dim: 6,
        ..ModelParams::default()
    };
    let l = build_liouvillian(&p).unwrap();
    let grid = uniform_grid(0.0, 20.0, 41).unwrap();
    let rho0 = DensityMatrix::fock(6, 1).unwrap();
    for integrator in [Integrator::Rk45, Integrator::Exact] {
        let opts = PropagateOptions {
            integrator,
            tol: 1e-11,
            ..Default::default()
        };
        let (states, _) = propagate_with(&l, &rho0, &grid, &opts).unwrap();
        for (t, r) in grid.iter().zip(&states) {
            assert!((r.population(1) - (-p.gamma * t).exp()).abs() < 1e-8);
        }
    }
}

#[test]
fn taylor_terms_from_vacuum_match_hand_expansion() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..5 {
        let p = ModelParams {
            omega: 1.0,
            detuning: rng.gen_range(0.01..2.0),
            chi: rng.gen_range(0.01..2.0),
            n_s: rng.gen_range(0.01..2.0),
            alpha: rng.gen_range(0.01..2.0),
            gamma: rng.gen_range(0.01..2.0),
            dim: 6,
        };
        let l = build_liouvillian(&p).unwrap();
        let rho0 = DensityMatrix::ground(p.dim);
        let (first, second) = vacuum_taylor_terms(&p);
        assert!(taylor_term(&l, &rho0, 1).unwrap().max_abs_diff(&first) < 1e-12);
        assert!(taylor_term(&l, &rho0, 2).unwrap().max_abs_diff(&second) < 1e-12);
    }
}

#[test]
fn ergotropy_matches_random_unitary_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let p = ModelParams {
        omega: 1.0,
        chi: 1.0,
        n_s: 0.0,
        dim: 3,
        ..ModelParams::default()
    };
    let hb = qbat_core::model::battery_hamiltonian(&p).unwrap();
    let mixture = DensityMatrix::diagonal(&[0.3, 0.7, 0.0]).unwrap();
    let (erg, _) = ergotropy(&mixture, &hb).unwrap();
    assert!((erg - 0.8).abs() < 1e-14);
    let mut states = vec![mixture];
    for _ in 0..3 {
        states.push(DensityMatrix::new(random_state(&mut rng, 3)).unwrap());
    }
    for rho in &states {
        let (erg, pd) = ergotropy(rho, &hb).unwrap();
        let e = energy(rho, &hb).unwrap();
        let best = brute_force_min_energy(&mut rng, &hb, rho.matrix(), 10_000);
        assert!(
            best >= pd.passive_energy - 1e-12,
            "search beat the passive bound"
        );
        assert!(
            (e - best - erg).abs() < 1e-3,
            "search {best} vs passive {}",
            pd.passive_energy
        );
    }
}

fn laguerre(n: usize, x: f64) -> f64 {
    let (mut a, mut b) = (1.0, 1.0 - x);
    if n == 0 {
        return a;
    }
    for k in 1..n {
        let next = ((2 * k + 1) as f64 - x) * b / (k + 1) as f64 - k as f64 * a / (k + 1) as f64;
        a = b;
        b = next;
    }
    b
}

#[test]
fn fock_wigner_matches_laguerre_form() {
    let grid = PhaseSpaceGrid {
        re: GridAxis::new(-2.0, 2.0, 9),
        im: GridAxis::new(-1.5, 1.5, 7),
    };
    for n in [0, 1, 2, 5] {
        let w = wigner(&DensityMatrix::fock(12, n).unwrap(), &grid).unwrap();
        for (i, x) in w.re_beta.iter().enumerate() {
            for (j, y) in w.im_beta.iter().enumerate() {
                let r2 = x * x + y * y;
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                let want = 2.0 / PI * sign * (-2.0 * r2).exp() * laguerre(n, 4.0 * r2);
                assert!((w.values[i][j] - want).abs() < 1e-11, "n={n} ({x},{y})");
            }
        }
    }
}

#[test]
fn coherent_wigner_is_displaced_gaussian() {
    let b0 = c(0.7, -0.4);
    let w = wigner(
        &DensityMatrix::coherent(30, b0).unwrap(),
        &PhaseSpaceGrid {
            re: GridAxis::new(-1.0, 2.0, 7),
            im: GridAxis::new(-2.0, 1.0, 7),
        },
    )
    .unwrap();
    for (i, x) in w.re_beta.iter().enumerate() {
        for (j, y) in w.im_beta.iter().enumerate() {
            let want = 2.0 / PI * (-2.0 * (c(*x, *y) - b0).norm_sqr()).exp();
            assert!((w.values[i][j] - want).abs() < 1e-11);
        }
    }
}

/// Density of `x = Re β` for Fock state `n`: `√2 |ψ_n(√2 x)|²` with
/// Hermite functions `ψ_n`.
fn quadrature_density(n: usize, x: f64) -> f64 {
    let q = (2f64).sqrt() * x;
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-q * q / 2.0).exp();
    for k in 0..n {
        let next =
            (2.0 / (k + 1) as f64).sqrt() * q * cur - (k as f64 / (k + 1) as f64).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (2f64).sqrt() * cur * cur
}

#[test]
fn wigner_marginal_is_quadrature_distribution() {
    let grid = PhaseSpaceGrid {
        re: GridAxis::new(-2.0, 2.0, 21),
        im: GridAxis::new(-5.0, 5.0, 401),
    };
    for n in [0, 1] {
        let w = wigner(&DensityMatrix::fock(8, n).unwrap(), &grid).unwrap();
        let marg = w.marginal_re();
        let peak = (0..21)
            .map(|i| quadrature_density(n, w.re_beta[i]))
            .fold(0.0, f64::max);
        for (i, x) in w.re_beta.iter().enumerate() {
            let want = quadrature_density(n, *x);
            assert!((marg[i] - want).abs() <= 0.01 * peak, "n={n} x={x}");
        }
    }
}
