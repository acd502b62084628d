//! Hermitian eigensolver: Householder reduction to a real symmetric
//! tridiagonal matrix followed by implicit QL iteration.

use super::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Relative bound on `‖A − A†‖_F / ‖A‖_F` accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-9;

const QL_MAX_SWEEPS: usize = 60;

#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in eigenvalue order.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `V diag(f(λ)) V†`.
    pub fn map_eigenvalues(&self, mut f: impl FnMut(f64) -> C64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let fl: Vec<C64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let v = &self.eigenvectors;
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n).map(|k| v[(i, k)] * fl[k] * v[(j, k)].conj()).sum()
        })
    }
}

pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEigen> {
    hermitian_eig_with_tol(a, HERMITIAN_TOL)
}

pub fn hermitian_eig_with_tol(a: &ComplexMatrix, tol: f64) -> Result<HermitianEigen> {
    let sym = checked_hermitian_part(a, tol)?;
    let (values, vectors) = decompose(sym, true)?;
    Ok(HermitianEigen {
        eigenvalues: values,
        eigenvectors: vectors.expect("vectors requested"),
    })
}

/// Eigenvalues only (ascending); skips the vector accumulation.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    let sym = checked_hermitian_part(a, HERMITIAN_TOL)?;
    decompose(sym, false).map(|(v, _)| v)
}

fn checked_hermitian_part(a: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    a.check_finite()?;
    let asym = a.hermiticity_error();
    let bound = tol * a.frobenius_norm();
    if asym > bound {
        return Err(Error::NonHermitianInput {
            asymmetry: asym,
            bound,
        });
    }
    Ok(a.hermitian_part())
}

fn decompose(
    mut a: ComplexMatrix,
    want_vectors: bool,
) -> Result<(Vec<f64>, Option<ComplexMatrix>)> {
    let n = a.dim();
    // Work at unit scale so squared norms neither underflow nor overflow.
    let scale = a.max_abs();
    if scale > 0.0 {
        a = a.scale_real(1.0 / scale);
    }
    let mut q = if want_vectors {
        Some(ComplexMatrix::identity(n))
    } else {
        None
    };
    tridiagonalize(&mut a, q.as_mut());

    // Rotate the complex sub-diagonal onto the positive reals with a
    // diagonal phase similarity.
    let mut d: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut e = vec![0.0; n];
    let mut phase = ONE;
    let mut phases = vec![ONE; n];
    for k in 0..n.saturating_sub(1) {
        let sub = a[(k + 1, k)];
        let mag = sub.norm();
        e[k] = mag;
        if mag > 0.0 {
            phase *= sub / mag;
        }
        phases[k + 1] = phase;
    }
    if let Some(z) = q.as_mut() {
        for (j, &ph) in phases.iter().enumerate() {
            for i in 0..n {
                z[(i, j)] *= ph;
            }
        }
    }

    tql(&mut d, &mut e, q.as_mut())?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let unscale = if scale > 0.0 { scale } else { 1.0 };
    let values: Vec<f64> = order.iter().map(|&i| d[i] * unscale).collect();
    let vectors = q.map(|z| ComplexMatrix::from_fn(n, |i, j| z[(i, order[j])]));
    Ok((values, vectors))
}

/// In-place Householder reduction `A ← Q† A Q`, leaving the Hermitian
/// tridiagonal part in `a` and accumulating `Q` into `q` when given.
fn tridiagonalize(a: &mut ComplexMatrix, mut q: Option<&mut ComplexMatrix>) {
    let n = a.dim();
    if n < 3 {
        return;
    }
    let mut v = vec![ZERO; n];
    let mut w = vec![ZERO; n];
    // Tails below this are dropped: a perturbation of eps·‖A‖_F.
    let negligible = f64::EPSILON * a.frobenius_norm();
    for k in 0..n - 2 {
        let lo = k + 1;
        let alpha = (lo..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        let tail = (lo + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>();
        if tail.sqrt() <= negligible {
            for i in lo + 1..n {
                a[(i, k)] = ZERO;
                a[(k, i)] = ZERO;
            }
            continue;
        }
        let x0 = a[(lo, k)];
        let ph = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        // v = x + e^{iθ}‖x‖ e₁ so that H x = −e^{iθ}‖x‖ e₁.
        for i in lo..n {
            v[i] = a[(i, k)];
        }
        v[lo] += ph * alpha;
        let vnorm2: f64 = (lo..n).map(|i| v[i].norm_sqr()).sum();
        let tau = 2.0 / vnorm2;

        // w = τ A v on the trailing block.
        for i in lo..n {
            w[i] = ZERO;
        }
        for j in lo..n {
            let vj = v[j];
            let col = a.column(j);
            for i in lo..n {
                w[i] += col[i] * vj;
            }
        }
        for wi in w[lo..n].iter_mut() {
            *wi *= tau;
        }
        // w ← w − (τ/2)(v†w) v
        let vw: C64 = (lo..n).map(|i| v[i].conj() * w[i]).sum();
        let kcoef = 0.5 * tau * vw;
        for i in lo..n {
            w[i] -= kcoef * v[i];
        }
        // A ← A − v w† − w v†
        for j in lo..n {
            let vjc = v[j].conj();
            let wjc = w[j].conj();
            let col = &mut a.as_mut_slice()[j * n..(j + 1) * n];
            for i in lo..n {
                col[i] -= v[i] * wjc + w[i] * vjc;
            }
        }
        a[(lo, k)] = -ph * alpha;
        a[(k, lo)] = (-ph * alpha).conj();
        for i in lo + 1..n {
            a[(i, k)] = ZERO;
            a[(k, i)] = ZERO;
        }

        // Q ← Q H, H = I − τ v v†
        if let Some(q) = q.as_deref_mut() {
            for i in 0..n {
                let s: C64 = (lo..n).map(|j| q[(i, j)] * v[j]).sum::<C64>() * tau;
                for j in lo..n {
                    q[(i, j)] -= s * v[j].conj();
                }
            }
        }
    }
}

/// Implicit QL with Wilkinson-type shifts on a symmetric tridiagonal
/// matrix (`d` diagonal, `e[i]` couples `i` and `i+1`).
fn tql(d: &mut [f64], e: &mut [f64], mut z: Option<&mut ComplexMatrix>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    // Absolute floor so blocks of negligible size still deflate; perturbing
    // by eps·‖T‖ keeps the decomposition backward stable.
    let anorm = (0..n).map(|i| d[i].abs() + e[i].abs()).fold(0.0, f64::max);
    let floor = f64::EPSILON * anorm;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_SWEEPS {
                return Err(Error::ConvergenceFailure {
                    routine: "hermitian_eig",
                    iterations: iter,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    let rows = z.dim();
                    let data = z.as_mut_slice();
                    let (left, right) = data.split_at_mut((i + 1) * rows);
                    let zi = &mut left[i * rows..];
                    let zi1 = &mut right[..rows];
                    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let fk = *b;
                        *b = *a * s + fk * c;
                        *a = *a * c - fk * s;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
