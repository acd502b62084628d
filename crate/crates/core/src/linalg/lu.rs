//! LU factorizations with partial pivoting: dense, and banded for the
//! Liouvillian's narrow-band structure.

use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Pivots smaller than this times the largest entry count as rank deficient.
const PIVOT_RTOL: f64 = 1e-14;

pub fn solve(a: &ComplexMatrix, rhs: &[C64]) -> Result<Vec<C64>> {
    if rhs.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: rhs.len(),
        });
    }
    let lu = Lu::factor(a)?;
    Ok(lu.solve(rhs))
}

#[derive(Debug, Clone)]
pub struct Lu {
    lu: ComplexMatrix,
    piv: Vec<usize>,
}

impl Lu {
    pub fn factor(a: &ComplexMatrix) -> Result<Self> {
        a.check_finite()?;
        let n = a.dim();
        let mut lu = a.clone();
        let mut piv = vec![0; n];
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax <= PIVOT_RTOL * scale {
                return Err(Error::SingularMatrix { pivot: k });
            }
            piv[k] = p;
            if p != k {
                for j in 0..n {
                    let d = lu.as_mut_slice();
                    d.swap(k + j * n, p + j * n);
                }
            }
            let inv = 1.0 / lu[(k, k)];
            {
                let col = &mut lu.as_mut_slice()[k * n..(k + 1) * n];
                col[k + 1..].iter_mut().for_each(|z| *z *= inv);
            }
            // Right-looking rank-1 update, column by column.
            let data = lu.as_mut_slice();
            let (left, right) = data.split_at_mut((k + 1) * n);
            let lcol = &left[k * n + k + 1..k * n + n];
            for j in 0..n - k - 1 {
                let col = &mut right[j * n..(j + 1) * n];
                let ukj = col[k];
                if ukj == ZERO {
                    continue;
                }
                for (x, l) in col[k + 1..].iter_mut().zip(lcol) {
                    *x -= l * ukj;
                }
            }
        }
        Ok(Self { lu, piv })
    }

    pub fn solve(&self, rhs: &[C64]) -> Vec<C64> {
        let n = self.lu.dim();
        let mut x = rhs.to_vec();
        for k in 0..n {
            x.swap(k, self.piv[k]);
        }
        for k in 0..n {
            let xk = x[k];
            if xk == ZERO {
                continue;
            }
            let col = self.lu.column(k);
            for i in k + 1..n {
                x[i] -= col[i] * xk;
            }
        }
        for k in (0..n).rev() {
            let col = self.lu.column(k);
            x[k] /= col[k];
            let xk = x[k];
            for i in 0..k {
                x[i] -= col[i] * xk;
            }
        }
        x
    }

    /// Determinant from the factorization.
    pub fn determinant(&self) -> C64 {
        let n = self.lu.dim();
        let mut det = C64::new(1.0, 0.0);
        for k in 0..n {
            det *= self.lu[(k, k)];
            if self.piv[k] != k {
                det = -det;
            }
        }
        det
    }
}

/// Square banded matrix with `kl` sub- and `ku` super-diagonals.
///
/// Each row stores the window of columns `[i − kl, i + ku + kl]`; the extra
/// `kl` columns on the right absorb fill-in from row interchanges.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<C64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            width,
            data: vec![ZERO; n * width],
        }
    }

    /// Builds from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(n: usize, entries: &[(usize, usize, C64)]) -> Self {
        let mut kl = 0;
        let mut ku = 0;
        for &(r, c, _) in entries {
            if r > c {
                kl = kl.max(r - c);
            } else {
                ku = ku.max(c - r);
            }
        }
        let mut m = Self::zeros(n, kl, ku);
        for &(r, c, v) in entries {
            *m.entry_mut(r, c) += v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    #[inline]
    fn offset(&self, r: usize, c: usize) -> usize {
        debug_assert!(c + self.kl >= r && c <= r + self.ku + self.kl);
        r * self.width + (c + self.kl - r)
    }

    #[inline]
    pub fn entry_mut(&mut self, r: usize, c: usize) -> &mut C64 {
        let o = self.offset(r, c);
        &mut self.data[o]
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        if c + self.kl < r || c > r + self.ku {
            return ZERO;
        }
        self.data[self.offset(r, c)]
    }

    /// Replaces row `r` by the unit row `e_r` (used to pin one unknown).
    pub fn set_unit_row(&mut self, r: usize) {
        let lo = r.saturating_sub(self.kl);
        let hi = (r + self.ku).min(self.n - 1);
        for c in lo..=hi {
            *self.entry_mut(r, c) = ZERO;
        }
        *self.entry_mut(r, r) = C64::new(1.0, 0.0);
    }

    pub fn factor(mut self) -> Result<BandLu> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let scale = self
            .data
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let mut piv = vec![0; n];
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut pmax = -1.0;
            for i in k..=last {
                let v = self.data[self.offset(i, k)].norm();
                if v > pmax {
                    pmax = v;
                    p = i;
                }
            }
            if pmax <= PIVOT_RTOL * scale {
                return Err(Error::SingularMatrix { pivot: k });
            }
            piv[k] = p;
            let cmax = (k + ku + kl).min(n - 1);
            if p != k {
                for c in k..=cmax {
                    let a = self.offset(k, c);
                    let b = self.offset(p, c);
                    self.data.swap(a, b);
                }
            }
            let pivot = self.data[self.offset(k, k)];
            let inv = 1.0 / pivot;
            for i in k + 1..=last {
                let oik = self.offset(i, k);
                let m = self.data[oik] * inv;
                self.data[oik] = m;
                if m == ZERO {
                    continue;
                }
                let ok = self.offset(k, k);
                let oi = self.offset(i, k);
                for t in 1..=cmax - k {
                    let u = self.data[ok + t];
                    self.data[oi + t] -= m * u;
                }
            }
        }
        Ok(BandLu { band: self, piv })
    }
}

#[derive(Debug, Clone)]
pub struct BandLu {
    band: BandMatrix,
    piv: Vec<usize>,
}

impl BandLu {
    pub fn solve(&self, rhs: &[C64]) -> Vec<C64> {
        let b = &self.band;
        let (n, kl, ku) = (b.n, b.kl, b.ku);
        assert_eq!(rhs.len(), n);
        let mut x = rhs.to_vec();
        for k in 0..n {
            x.swap(k, self.piv[k]);
            let xk = x[k];
            for i in k + 1..=(k + kl).min(n - 1) {
                x[i] -= b.data[b.offset(i, k)] * xk;
            }
        }
        for k in (0..n).rev() {
            let cmax = (k + ku + kl).min(n - 1);
            let ok = b.offset(k, k);
            let mut acc = x[k];
            for t in 1..=cmax - k {
                acc -= b.data[ok + t] * x[k + t];
            }
            x[k] = acc / b.data[ok];
        }
        x
    }
}
