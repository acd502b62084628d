use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, norm2, ComplexMatrix, C64};

pub const HERMITICITY_TOL: f64 = 1e-9;
pub const TRACE_TOL: f64 = 1e-9;
/// Most negative eigenvalue tolerated in a stored state.
pub const PSD_TOL: f64 = 1e-8;

/// A Hermitian, unit-trace, positive semidefinite matrix (within tolerance).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDiagnostics {
    /// `|tr ρ − 1|`.
    pub trace_err: f64,
    /// `‖ρ − ρ†‖_F`.
    pub hermiticity: f64,
    pub min_eig: f64,
    /// `tr ρ²`.
    pub purity: f64,
}

impl DensityMatrix {
    /// Validates all three state invariants.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        mat.check_finite()?;
        let herm = mat.hermiticity_error();
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidState(format!(
                "||rho - rho^H||_F = {herm:.3e} exceeds {HERMITICITY_TOL:e}"
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "trace {tr} differs from 1 by more than {TRACE_TOL:e}"
            )));
        }
        let min = min_eigenvalue(&mat)?;
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "minimum eigenvalue {min:.3e} below -{PSD_TOL:e}"
            )));
        }
        Ok(Self { mat })
    }

    /// Wraps a matrix the caller has already checked.
    pub(crate) fn from_trusted(mat: ComplexMatrix) -> Self {
        Self { mat }
    }

    /// `|0⟩⟨0|`.
    pub fn ground(dim: usize) -> Self {
        Self::fock(dim, 0).expect("level 0 always exists")
    }

    /// `|k⟩⟨k|`.
    pub fn fock(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: k + 1,
            });
        }
        let mut m = ComplexMatrix::zeros(dim);
        m[(k, k)] = C64::new(1.0, 0.0);
        Ok(Self { mat: m })
    }

    /// `|ψ⟩⟨ψ|` after normalising `ψ`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let nrm = norm2(psi);
        if psi.is_empty() || nrm == 0.0 || !nrm.is_finite() {
            return Err(Error::InvalidState(
                "pure state vector has zero norm".into(),
            ));
        }
        let v: Vec<C64> = psi.iter().map(|z| z / nrm).collect();
        let mat = ComplexMatrix::from_fn(v.len(), |i, j| v[i] * v[j].conj());
        Ok(Self { mat })
    }

    /// Truncated coherent state `|β⟩` on `dim` levels, renormalised.
    pub fn coherent(dim: usize, beta: C64) -> Result<Self> {
        let mut amp = Vec::with_capacity(dim);
        let mut a = C64::new((-0.5 * beta.norm_sqr()).exp(), 0.0);
        for n in 0..dim {
            if n > 0 {
                a = a * beta / (n as f64).sqrt();
            }
            amp.push(a);
        }
        Self::pure(&amp)
    }

    /// Diagonal state with the given populations (normalised).
    pub fn diagonal(pops: &[f64]) -> Result<Self> {
        if pops.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidState(
                "populations must be finite and >= 0".into(),
            ));
        }
        let total: f64 = pops.iter().sum();
        if pops.is_empty() || total <= 0.0 {
            return Err(Error::InvalidState("populations sum to zero".into()));
        }
        let d: Vec<f64> = pops.iter().map(|p| p / total).collect();
        Ok(Self {
            mat: ComplexMatrix::from_real_diag(&d),
        })
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn purity(&self) -> f64 {
        // tr ρ² = Σ |ρ_ij|² for Hermitian ρ.
        self.mat.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn population(&self, n: usize) -> f64 {
        self.mat[(n, n)].re
    }

    pub fn diagnostics(&self) -> Result<StateDiagnostics> {
        Ok(StateDiagnostics {
            trace_err: (self.mat.trace() - C64::new(1.0, 0.0)).norm(),
            hermiticity: self.mat.hermiticity_error(),
            min_eig: min_eigenvalue(&self.mat)?,
            purity: self.purity(),
        })
    }
}

fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    let ev = hermitian_eigenvalues(&m.hermitian_part())?;
    Ok(ev[0])
}
