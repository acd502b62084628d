//! Action of the matrix exponential on a vector, `exp(tA) v`, by a
//! scaled truncated Taylor series. Needs only products with `A`, so it works
//! matrix-free on any [`LinearOperator`].

use super::matrix::{norm2, ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Linear map on `C^n`.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    /// `y ← A x`.
    fn apply(&self, x: &[C64], y: &mut [C64]);

    /// An upper bound on (or the exact value of) `‖A‖₁`.
    fn norm1(&self) -> f64;
}

impl LinearOperator for ComplexMatrix {
    fn dim(&self) -> usize {
        ComplexMatrix::dim(self)
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        self.matvec_into(x, y)
    }

    fn norm1(&self) -> f64 {
        ComplexMatrix::norm1(self)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ExpmOptions {
    /// Relative truncation tolerance per substep.
    pub tol: f64,
    /// Substep size target for `‖hA‖₁`.
    pub theta: f64,
    pub max_terms: usize,
    /// `‖tA‖₁` above this raises [`Error::OverflowRisk`].
    pub safety_bound: f64,
}

impl Default for ExpmOptions {
    fn default() -> Self {
        Self {
            tol: 1e-16,
            theta: 4.0,
            max_terms: 80,
            safety_bound: 1e7,
        }
    }
}

pub fn expm_apply(a: &ComplexMatrix, v: &[C64], t: f64) -> Result<Vec<C64>> {
    expm_multiply(a, v, t, &ExpmOptions::default())
}

/// `exp(tA) v` for `t ≥ 0`.
pub fn expm_multiply<A: LinearOperator + ?Sized>(
    a: &A,
    v: &[C64],
    t: f64,
    opts: &ExpmOptions,
) -> Result<Vec<C64>> {
    let n = a.dim();
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.len(),
        });
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: format!("exponential time must be finite and >= 0, got {t}"),
        });
    }
    if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let tnorm = t * a.norm1();
    if !tnorm.is_finite() || tnorm > opts.safety_bound {
        return Err(Error::OverflowRisk {
            norm: tnorm,
            bound: opts.safety_bound,
        });
    }
    if tnorm == 0.0 {
        return Ok(v.to_vec());
    }
    let steps = (tnorm / opts.theta).ceil().max(1.0) as usize;
    let h = t / steps as f64;

    let mut x = v.to_vec();
    let mut term = vec![ZERO; n];
    let mut next = vec![ZERO; n];
    for _ in 0..steps {
        term.copy_from_slice(&x);
        let mut acc = x.clone();
        let mut converged = false;
        for k in 1..=opts.max_terms {
            a.apply(&term, &mut next);
            let s = h / k as f64;
            for (tn, nx) in term.iter_mut().zip(&next) {
                *tn = nx * s;
            }
            for (ac, tn) in acc.iter_mut().zip(&term) {
                *ac += tn;
            }
            let tn = norm2(&term);
            // Two consecutive small terms guard against a lucky cancellation.
            if tn <= opts.tol * norm2(&acc) {
                if converged {
                    break;
                }
                converged = true;
            } else {
                converged = false;
            }
            if k == opts.max_terms {
                return Err(Error::ConvergenceFailure {
                    routine: "expm_multiply",
                    iterations: k,
                });
            }
        }
        x = acc;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn zero_time_is_identity() {
        let a = ComplexMatrix::from_fn(3, |i, j| c((i + 2 * j) as f64, 1.0));
        let v = vec![c(1., 0.), c(0., 2.), c(-1., 1.)];
        assert_eq!(expm_apply(&a, &v, 0.0).unwrap(), v);
    }

    #[test]
    fn diagonal_decay() {
        let a = ComplexMatrix::from_real_diag(&[-1.0, -2.0]);
        let r = expm_apply(&a, &[c(1., 0.), c(1., 0.)], 1.0).unwrap();
        assert!((r[0].re - (-1f64).exp()).abs() < 1e-14);
        assert!((r[1].re - (-2f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn overflow_guard() {
        let a = ComplexMatrix::from_real_diag(&[1.0, 1.0]);
        let opts = ExpmOptions {
            safety_bound: 10.0,
            ..Default::default()
        };
        assert!(matches!(
            expm_multiply(&a, &[c(1., 0.), c(0., 0.)], 11.0, &opts),
            Err(Error::OverflowRisk { .. })
        ));
    }

    #[test]
    fn nilpotent_exact() {
        // exp(tN) = I + tN for N² = 0
        let a = ComplexMatrix::from_rows(&[vec![c(0., 0.), c(1., 0.)], vec![c(0., 0.), c(0., 0.)]])
            .unwrap();
        let r = expm_apply(&a, &[c(0., 0.), c(1., 0.)], 3.5).unwrap();
        assert!((r[0] - c(3.5, 0.)).norm() < 1e-14);
        assert!((r[1] - c(1., 0.)).norm() < 1e-14);
    }
}
