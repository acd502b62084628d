//! Reference computations shared by the integration and acceptance tests.
//! Nothing here calls into the library's numerical kernels.

#![allow(dead_code)]

use qbat_core::linalg::{ComplexMatrix, C64};
use qbat_core::model::ModelParams;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let (u1, u2): (f64, f64) = (rng.gen_range(1e-12..1.0), rng.gen_range(0.0..1.0));
    C64::from_polar((-2.0 * u1.ln()).sqrt(), 2.0 * PI * u2)
}

/// Orthonormalises the columns of `m` (classical Gram–Schmidt, twice).
pub fn gram_schmidt(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.dim();
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = m.column(j).to_vec();
        for _ in 0..2 {
            for u in &cols {
                let p: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= p * ui;
                }
            }
        }
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= nrm);
        cols.push(v);
    }
    ComplexMatrix::from_fn(n, |i, j| cols[j][i])
}

/// Haar-distributed unitary (QR of a complex Gaussian matrix).
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, |_, _| gaussian(rng));
    gram_schmidt(&g)
}

/// Unitary within about `eps` of the identity.
fn nearby_unitary(rng: &mut ChaCha8Rng, n: usize, eps: f64) -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(n);
    for j in 0..n {
        for i in 0..n {
            m[(i, j)] += gaussian(rng) * eps;
        }
    }
    gram_schmidt(&m)
}

/// Random full-rank state: random spectrum rotated by a random unitary.
pub fn random_state(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let mut p: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= s);
    let u = random_unitary(rng, n);
    let r = u
        .matmul(&ComplexMatrix::from_real_diag(&p))
        .matmul(&u.adjoint());
    r.hermitian_part()
}

fn diag_energy(h: &ComplexMatrix, r: &ComplexMatrix) -> f64 {
    (0..h.dim()).map(|k| (h[(k, k)] * r[(k, k)]).re).sum()
}

/// `min_U tr[h U ρ U†]` for diagonal `h` by random search: Haar samples
/// followed by shrinking random perturbations of the incumbent, `samples`
/// unitaries in total.
pub fn brute_force_min_energy(
    rng: &mut ChaCha8Rng,
    h: &ComplexMatrix,
    rho: &ComplexMatrix,
    samples: usize,
) -> f64 {
    let n = h.dim();
    let global = samples / 5;
    let mut best_u = ComplexMatrix::identity(n);
    let mut best = diag_energy(h, rho);
    for _ in 0..global {
        let u = random_unitary(rng, n);
        let e = diag_energy(h, &u.matmul(rho).matmul(&u.adjoint()));
        if e < best {
            best = e;
            best_u = u;
        }
    }
    let local = samples - global;
    for k in 0..local {
        let eps = 0.5 * (1e-4f64 / 0.5).powf(k as f64 / local as f64);
        let u = nearby_unitary(rng, n, eps).matmul(&best_u);
        let e = diag_energy(h, &u.matmul(rho).matmul(&u.adjoint()));
        if e < best {
            best = e;
            best_u = u;
        }
    }
    best
}

/// `β' = −(iΔ + γ/2) β − iα` by classical RK4 with step `1e-3`.
pub fn beta_rk4(p: &ModelParams, times: &[f64]) -> Vec<C64> {
    let k = c(p.gamma / 2.0, p.detuning);
    let f = |b: C64| -k * b - c(0.0, p.alpha);
    let h: f64 = 1e-3;
    let mut b = c(0.0, 0.0);
    let mut t = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        while t < target - 1e-12 {
            let dt = h.min(target - t);
            let k1 = f(b);
            let k2 = f(b + k1 * (dt / 2.0));
            let k3 = f(b + k2 * (dt / 2.0));
            let k4 = f(b + k3 * dt);
            b += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
            t += dt;
        }
        out.push(b);
    }
    out
}

/// Hand expansion of `𝓛 |0⟩⟨0|` and `𝓛² |0⟩⟨0|`. The `|0⟩⟨0|` entry of the
/// second term is `−2α²`, the value forced by `tr 𝓛²ρ = 0` against the
/// `+2α²` on `|1⟩⟨1|`.
pub fn vacuum_taylor_terms(p: &ModelParams) -> (ComplexMatrix, ComplexMatrix) {
    let (a, g) = (p.alpha, p.gamma);
    let e1 = p.detuning + p.chi / (1.0 + p.n_s);
    let mut first = ComplexMatrix::zeros(p.dim);
    first[(0, 1)] = c(0.0, a);
    first[(1, 0)] = c(0.0, -a);
    let mut second = ComplexMatrix::zeros(p.dim);
    second[(0, 0)] = c(-2.0 * a * a, 0.0);
    second[(1, 1)] = c(2.0 * a * a, 0.0);
    second[(0, 2)] = c(-(2f64).sqrt() * a * a, 0.0);
    second[(2, 0)] = second[(0, 2)];
    second[(0, 1)] = c(0.0, a) * c(-g / 2.0, e1);
    second[(1, 0)] = c(0.0, a) * c(g / 2.0, e1);
    (first, second)
}
