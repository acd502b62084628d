//! Krylov–Schur iteration for a few eigenpairs of largest modulus.

use super::expm::LinearOperator;
use super::matrix::{dot, norm2, ComplexMatrix, C64, ZERO};
use super::schur::{schur, triangular_eigenvectors};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct KrylovOptions {
    /// Number of wanted eigenpairs.
    pub nev: usize,
    /// Krylov subspace size; clamped to the operator dimension.
    pub ncv: usize,
    /// Residual tolerance relative to `|μ|`.
    pub tol: f64,
    pub max_restarts: usize,
}

impl KrylovOptions {
    pub fn for_nev(nev: usize) -> Self {
        Self {
            nev,
            ncv: (2 * nev + 20).max(30),
            tol: 1e-12,
            max_restarts: 400,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PartialEigen {
    /// Sorted by descending modulus.
    pub values: Vec<C64>,
    /// Unit-norm Ritz vectors.
    pub vectors: Vec<Vec<C64>>,
    pub residuals: Vec<f64>,
    pub restarts: usize,
}

/// Eigenpairs of `a` with the largest `|μ|`.
pub fn dominant_eigenpairs<A: LinearOperator + ?Sized>(
    a: &A,
    start: &[C64],
    opts: &KrylovOptions,
) -> Result<PartialEigen> {
    let n = a.dim();
    if start.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: start.len(),
        });
    }
    let nev = opts.nev.min(n).max(1);
    let m = opts.ncv.min(n).max(nev + 1).min(n);
    let s0 = norm2(start);
    if s0 == 0.0 {
        return Err(Error::InvalidParameter {
            name: "start",
            reason: "Krylov start vector is zero".into(),
        });
    }

    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m + 1);
    basis.push(start.iter().map(|z| z / s0).collect());
    // (m+1)×(m+1) storage; column m unused.
    let mut h = ComplexMatrix::zeros(m + 1);
    let mut k = 0usize;
    let mut w = vec![ZERO; n];
    let mut fill_seed = 0x9e37_79b9_7f4a_7c15u64;

    for restart in 0..=opts.max_restarts {
        for j in k..m {
            a.apply(&basis[j], &mut w);
            let wnorm0 = norm2(&w);
            let coeffs = orthogonalize(&basis, &mut w);
            for (i, cf) in coeffs.iter().enumerate() {
                h[(i, j)] = *cf;
            }
            let mut beta = norm2(&w);
            if beta <= 1e-13 * wnorm0.max(f64::MIN_POSITIVE) {
                // Invariant subspace found: continue with a fresh direction.
                beta = 0.0;
                if basis.len() < n {
                    w = fresh_direction(&basis, n, &mut fill_seed);
                } else {
                    w.iter_mut().for_each(|z| *z = ZERO);
                }
            }
            h[(j + 1, j)] = C64::new(beta, 0.0);
            let wn = norm2(&w);
            let next: Vec<C64> = if wn > 0.0 {
                w.iter().map(|z| z / wn).collect()
            } else {
                vec![ZERO; n]
            };
            if basis.len() > j + 1 {
                basis[j + 1] = next;
            } else {
                basis.push(next);
            }
        }

        let s = ComplexMatrix::from_fn(m, |i, j| h[(i, j)]);
        let mut sch = schur(&s, true)?;
        sort_schur_by_modulus(&mut sch.t, &mut sch.q);
        let b: Vec<C64> = (0..m)
            .map(|j| (0..m).map(|i| h[(m, i)] * sch.q[(i, j)]).sum())
            .collect();

        // Eigenvectors of the leading nev×nev block of T give the Ritz
        // vectors; their residual norms are |b·y|.
        let tk = ComplexMatrix::from_fn(nev, |i, j| sch.t[(i, j)]);
        let mut y = triangular_eigenvectors(&tk);
        let mut residuals = Vec::with_capacity(nev);
        let mut all_ok = true;
        for j in 0..nev {
            let col = &mut y.as_mut_slice()[j * nev..(j + 1) * nev];
            let nrm = norm2(col);
            col.iter_mut().for_each(|z| *z /= nrm);
            let r: C64 = (0..nev).map(|i| b[i] * col[i]).sum();
            let mu = sch.t[(j, j)].norm();
            residuals.push(r.norm());
            if r.norm() > opts.tol * mu.max(f64::MIN_POSITIVE) {
                all_ok = false;
            }
        }

        if all_ok {
            let mut vectors = Vec::with_capacity(nev);
            for j in 0..nev {
                // x = V Q[:, :nev] y_j
                let mut coeff = vec![ZERO; m];
                for (i, c) in coeff.iter_mut().enumerate() {
                    *c = (0..nev).map(|l| sch.q[(i, l)] * y[(l, j)]).sum();
                }
                let mut x = vec![ZERO; n];
                for (vi, ci) in basis.iter().zip(&coeff) {
                    for (xe, ve) in x.iter_mut().zip(vi) {
                        *xe += ve * ci;
                    }
                }
                let nrm = norm2(&x);
                x.iter_mut().for_each(|z| *z /= nrm);
                vectors.push(x);
            }
            return Ok(PartialEigen {
                values: (0..nev).map(|j| sch.t[(j, j)]).collect(),
                vectors,
                residuals,
                restarts: restart,
            });
        }
        if m == n {
            // Full space already spanned; nothing left to gain.
            return Err(Error::ConvergenceFailure {
                routine: "krylov_schur",
                iterations: restart,
            });
        }

        // Thick restart keeping p Schur vectors.
        let p = (nev + (m - nev) / 2).min(m - 1);
        let mut kept: Vec<Vec<C64>> = Vec::with_capacity(m + 1);
        for j in 0..p {
            let mut x = vec![ZERO; n];
            for (i, vi) in basis.iter().take(m).enumerate() {
                let q = sch.q[(i, j)];
                if q == ZERO {
                    continue;
                }
                for (xe, ve) in x.iter_mut().zip(vi) {
                    *xe += ve * q;
                }
            }
            kept.push(x);
        }
        kept.push(basis[m].clone());
        basis = kept;
        h = ComplexMatrix::zeros(m + 1);
        for j in 0..p {
            for i in 0..=j {
                h[(i, j)] = sch.t[(i, j)];
            }
            h[(p, j)] = b[j];
        }
        k = p;
    }
    Err(Error::ConvergenceFailure {
        routine: "krylov_schur",
        iterations: opts.max_restarts,
    })
}

/// Classical Gram–Schmidt applied twice; returns the projection coefficients.
fn orthogonalize(basis: &[Vec<C64>], w: &mut [C64]) -> Vec<C64> {
    let mut coeffs = vec![ZERO; basis.len()];
    for _ in 0..2 {
        let proj: Vec<C64> = basis.iter().map(|v| dot(v, w)).collect();
        for (v, p) in basis.iter().zip(&proj) {
            for (we, ve) in w.iter_mut().zip(v) {
                *we -= ve * p;
            }
        }
        for (c, p) in coeffs.iter_mut().zip(&proj) {
            *c += p;
        }
    }
    coeffs
}

fn fresh_direction(basis: &[Vec<C64>], n: usize, seed: &mut u64) -> Vec<C64> {
    let mut next = || {
        *seed ^= *seed << 13;
        *seed ^= *seed >> 7;
        *seed ^= *seed << 17;
        (*seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut w: Vec<C64> = (0..n).map(|_| C64::new(next(), next())).collect();
    orthogonalize(basis, &mut w);
    w
}

/// Reorders an upper triangular Schur factor so that `|T_kk|` is
/// non-increasing, updating the Schur vectors.
pub(crate) fn sort_schur_by_modulus(t: &mut ComplexMatrix, q: &mut ComplexMatrix) {
    let n = t.dim();
    // Insertion sort by adjacent swaps.
    for i in 1..n {
        let mut k = i;
        while k > 0 && t[(k, k)].norm() > t[(k - 1, k - 1)].norm() {
            swap_adjacent(t, q, k - 1);
            k -= 1;
        }
    }
}

/// Swaps diagonal entries `k` and `k+1` of an upper triangular `T` by a
/// unitary similarity.
fn swap_adjacent(t: &mut ComplexMatrix, q: &mut ComplexMatrix, k: usize) {
    let n = t.dim();
    let t11 = t[(k, k)];
    let t22 = t[(k + 1, k + 1)];
    let (c, s) = rotation(t[(k, k + 1)], t22 - t11);
    for j in k + 2..n {
        let x = t[(k, j)];
        let y = t[(k + 1, j)];
        t[(k, j)] = x * c + s * y;
        t[(k + 1, j)] = y * c - s.conj() * x;
    }
    let sc = s.conj();
    for i in 0..k {
        let x = t[(i, k)];
        let y = t[(i, k + 1)];
        t[(i, k)] = x * c + sc * y;
        t[(i, k + 1)] = y * c - s * x;
    }
    t[(k, k)] = t22;
    t[(k + 1, k + 1)] = t11;
    for i in 0..q.dim() {
        let x = q[(i, k)];
        let y = q[(i, k + 1)];
        q[(i, k)] = x * c + sc * y;
        q[(i, k + 1)] = y * c - s * x;
    }
}

fn rotation(f: C64, g: C64) -> (f64, C64) {
    let af = f.norm();
    let ag = g.norm();
    if ag == 0.0 {
        return (1.0, ZERO);
    }
    if af == 0.0 {
        return (0.0, g.conj() / ag);
    }
    let r = af.hypot(ag);
    (af / r, (f / af) * g.conj() / r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn schur_reordering_preserves_similarity() {
        let a = ComplexMatrix::from_fn(6, |i, j| {
            c((i * 3 + j) as f64 % 5.0 - 2.0, (i as f64 - j as f64) * 0.3)
        });
        let mut s = schur(&a, true).unwrap();
        sort_schur_by_modulus(&mut s.t, &mut s.q);
        let recon = s.q.matmul(&s.t).matmul(&s.q.adjoint());
        assert!((&recon - &a).frobenius_norm() < 1e-11 * a.frobenius_norm());
        for k in 1..6 {
            assert!(s.t[(k, k)].norm() <= s.t[(k - 1, k - 1)].norm() + 1e-12);
            for i in k + 1..6 {
                assert!(s.t[(i, k)].norm() < 1e-12);
            }
        }
    }

    #[test]
    fn finds_dominant_of_diagonal() {
        let n = 200;
        let diag: Vec<C64> = (0..n)
            .map(|i| {
                c(
                    (-0.05 * i as f64).exp() * (0.7 * i as f64).cos(),
                    (-0.05 * i as f64).exp() * (0.7 * i as f64).sin(),
                )
            })
            .collect();
        let a = ComplexMatrix::from_diag(&diag);
        let start: Vec<C64> = (0..n).map(|i| c(1.0, 0.1 * i as f64)).collect();
        let r = dominant_eigenpairs(&a, &start, &KrylovOptions::for_nev(4)).unwrap();
        for (k, mu) in r.values.iter().enumerate() {
            assert!(
                (mu - diag[k]).norm() < 1e-10,
                "k={k} got {mu} want {}",
                diag[k]
            );
            assert!((r.vectors[k][k].norm() - 1.0).abs() < 1e-8);
        }
    }
}
