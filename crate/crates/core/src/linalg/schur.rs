//! General complex eigensolver: Householder reduction to upper Hessenberg
//! form, single-shift complex QR iteration to Schur form, and eigenvectors
//! by back-substitution on the triangular factor.

use super::matrix::{norm2, ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

const QR_ITERS_PER_EIGENVALUE: usize = 60;

#[derive(Debug, Clone)]
pub struct GeneralEigen {
    pub eigenvalues: Vec<C64>,
    /// Unit-norm right eigenvectors as columns, paired with `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

/// Complex Schur form `A = Q T Q†` with `T` upper triangular.
#[derive(Debug, Clone)]
pub struct Schur {
    pub q: ComplexMatrix,
    pub t: ComplexMatrix,
}

impl Schur {
    pub fn eigenvalues(&self) -> Vec<C64> {
        self.t.diagonal()
    }
}

pub fn general_eig(a: &ComplexMatrix) -> Result<GeneralEigen> {
    let schur = schur(a, true)?;
    let y = triangular_eigenvectors(&schur.t);
    let n = a.dim();
    let mut v = schur.q.matmul(&y);
    for j in 0..n {
        let col = &mut v.as_mut_slice()[j * n..(j + 1) * n];
        let nrm = norm2(col);
        if nrm > 0.0 {
            col.iter_mut().for_each(|z| *z /= nrm);
        }
    }
    Ok(GeneralEigen {
        eigenvalues: schur.t.diagonal(),
        eigenvectors: v,
    })
}

pub fn general_eigenvalues(a: &ComplexMatrix) -> Result<Vec<C64>> {
    Ok(schur(a, false)?.eigenvalues())
}

/// Computes the Schur form. When `full` is false only the eigenvalues on the
/// diagonal of `t` are meaningful and `q` is left as the identity.
pub fn schur(a: &ComplexMatrix, full: bool) -> Result<Schur> {
    a.check_finite()?;
    let n = a.dim();
    let mut h = a.clone();
    let mut q = ComplexMatrix::identity(n);
    hessenberg(&mut h, full.then_some(&mut q));
    hessenberg_qr(&mut h, full.then_some(&mut q), full)?;
    for j in 0..n {
        for i in j + 1..n {
            h[(i, j)] = ZERO;
        }
    }
    Ok(Schur { q, t: h })
}

/// Householder reduction to upper Hessenberg form, `A ← Q† A Q`.
pub(crate) fn hessenberg(a: &mut ComplexMatrix, mut q: Option<&mut ComplexMatrix>) {
    let n = a.dim();
    if n < 3 {
        return;
    }
    let mut v = vec![ZERO; n];
    // Dropping a tail this small is a backward-stable perturbation, and it
    // keeps squared norms clear of underflow.
    let negligible = f64::EPSILON * a.frobenius_norm();
    for k in 0..n - 2 {
        let lo = k + 1;
        let tail: f64 = (lo + 1..n).map(|i| a[(i, k)].norm_sqr()).sum();
        if tail.sqrt() <= negligible {
            for i in lo + 1..n {
                a[(i, k)] = ZERO;
            }
            continue;
        }
        let alpha = (a[(lo, k)].norm_sqr() + tail).sqrt();
        let x0 = a[(lo, k)];
        let ph = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        for i in lo..n {
            v[i] = a[(i, k)];
        }
        v[lo] += ph * alpha;
        let tau = 2.0 / (lo..n).map(|i| v[i].norm_sqr()).sum::<f64>();

        // Left: A ← (I − τvv†) A on rows lo.., columns k..
        for j in k..n {
            let col = &mut a.as_mut_slice()[j * n..(j + 1) * n];
            let s: C64 = (lo..n).map(|i| v[i].conj() * col[i]).sum::<C64>() * tau;
            for i in lo..n {
                col[i] -= s * v[i];
            }
        }
        // Right: A ← A (I − τvv†) on all rows, columns lo..
        let mut s = vec![ZERO; n];
        for j in lo..n {
            let vj = v[j];
            let col = a.column(j);
            for i in 0..n {
                s[i] += col[i] * vj;
            }
        }
        for j in lo..n {
            let vjc = v[j].conj() * tau;
            let col = &mut a.as_mut_slice()[j * n..(j + 1) * n];
            for i in 0..n {
                col[i] -= s[i] * vjc;
            }
        }
        a[(lo, k)] = -ph * alpha;
        for i in lo + 1..n {
            a[(i, k)] = ZERO;
        }
        if let Some(q) = q.as_deref_mut() {
            let mut s = vec![ZERO; n];
            for j in lo..n {
                let vj = v[j];
                let col = q.column(j);
                for i in 0..n {
                    s[i] += col[i] * vj;
                }
            }
            for j in lo..n {
                let vjc = v[j].conj() * tau;
                let col = &mut q.as_mut_slice()[j * n..(j + 1) * n];
                for i in 0..n {
                    col[i] -= s[i] * vjc;
                }
            }
        }
    }
}

/// Rotation `G = [[c, s], [−s̄, c]]` with real `c` zeroing `y` in `G (x, y)ᵀ`.
#[inline]
fn givens(x: C64, y: C64) -> (f64, C64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, ZERO);
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let r = ax.hypot(ay);
    (ax / r, (x / ax) * y.conj() / r)
}

/// Shifted QR on an upper Hessenberg matrix. With `full`, the whole matrix
/// is updated so that it converges to the Schur factor `T`.
fn hessenberg_qr(
    h: &mut ComplexMatrix,
    mut q: Option<&mut ComplexMatrix>,
    full: bool,
) -> Result<()> {
    let n = h.dim();
    if n == 1 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let hnorm = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut ihi = n - 1;
    let mut its = 0usize;
    let mut total = 0usize;
    let max_total = QR_ITERS_PER_EIGENVALUE * n;

    while ihi > 0 {
        // Locate the active unreduced block [l, ihi].
        let mut l = ihi;
        while l > 0 {
            let s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let s = if s == 0.0 { hnorm } else { s };
            if h[(l, l - 1)].norm() <= eps * s {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == ihi {
            ihi -= 1;
            its = 0;
            continue;
        }
        its += 1;
        total += 1;
        if total > max_total {
            return Err(Error::ConvergenceFailure {
                routine: "general_eig",
                iterations: total,
            });
        }

        let shift = if its % 11 == 0 {
            // Exceptional shift to break cycles.
            let sub = h[(ihi, ihi - 1)].re.abs()
                + if ihi >= 2 {
                    h[(ihi - 1, ihi - 2)].re.abs()
                } else {
                    0.0
                };
            h[(ihi, ihi)] + C64::new(0.75 * sub, 0.0)
        } else {
            wilkinson_shift(
                h[(ihi - 1, ihi - 1)],
                h[(ihi - 1, ihi)],
                h[(ihi, ihi - 1)],
                h[(ihi, ihi)],
            )
        };

        let (col_hi, row_lo) = if full { (n, 0) } else { (ihi + 1, l) };
        let mut x = h[(l, l)] - shift;
        let mut y = h[(l + 1, l)];
        for k in l..ihi {
            if k > l {
                x = h[(k, k - 1)];
                y = h[(k + 1, k - 1)];
            }
            let (c, s) = givens(x, y);
            let jstart = if k > l { k - 1 } else { k };
            for j in jstart..col_hi {
                let a = h[(k, j)];
                let b = h[(k + 1, j)];
                h[(k, j)] = a * c + s * b;
                h[(k + 1, j)] = b * c - s.conj() * a;
            }
            if k > l {
                h[(k + 1, k - 1)] = ZERO;
            }
            let iend = (k + 2).min(ihi);
            apply_right(h, row_lo, iend + 1, k, c, s);
            if let Some(q) = q.as_deref_mut() {
                apply_right(q, 0, n, k, c, s);
            }
        }
    }
    Ok(())
}

/// `M ← M G†` on columns `k, k+1`, rows `[r0, r1)`.
#[inline]
fn apply_right(m: &mut ComplexMatrix, r0: usize, r1: usize, k: usize, c: f64, s: C64) {
    let n = m.dim();
    let data = m.as_mut_slice();
    let (left, right) = data.split_at_mut((k + 1) * n);
    let ck = &mut left[k * n..];
    let ck1 = &mut right[..n];
    let sc = s.conj();
    for i in r0..r1 {
        let a = ck[i];
        let b = ck1[i];
        ck[i] = a * c + b * sc;
        ck1[i] = b * c - a * s;
    }
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    // Eigenvalues of the trailing 2×2 block are (a+d)/2 ± disc; take the
    // one closer to d.
    let half = 0.5 * (a - d);
    let disc = (half * half + b * c).sqrt();
    let mean = 0.5 * (a + d);
    let e1 = mean + disc;
    let e2 = mean - disc;
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// Eigenvectors of an upper triangular matrix, one per diagonal entry,
/// with near-zero denominators perturbed so defective inputs still return
/// finite vectors.
pub(crate) fn triangular_eigenvectors(t: &ComplexMatrix) -> ComplexMatrix {
    let n = t.dim();
    let tnorm = t.frobenius_norm().max(f64::MIN_POSITIVE);
    let smin = (f64::EPSILON * tnorm).max(f64::MIN_POSITIVE * n as f64);
    let mut y = ComplexMatrix::zeros(n);
    let mut x = vec![ZERO; n];
    for k in 0..n {
        let lambda = t[(k, k)];
        x[..=k].iter_mut().for_each(|z| *z = ZERO);
        x[k] = ONE;
        for j in (0..k).rev() {
            let mut acc = ZERO;
            for m in j + 1..=k {
                acc += t[(j, m)] * x[m];
            }
            let mut denom = t[(j, j)] - lambda;
            if denom.norm() < smin {
                denom = C64::new(smin, 0.0);
            }
            x[j] = -acc / denom;
            let big = x[j].norm();
            if big > 1e100 {
                let inv = 1.0 / big;
                x[j..=k].iter_mut().for_each(|z| *z *= inv);
            }
        }
        for i in 0..=k {
            y[(i, k)] = x[i];
        }
    }
    y
}
