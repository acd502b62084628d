//! Dense complex linear algebra: the matrix type, Hermitian and general
//! eigensolvers, LU solves, the exponential action, and a Krylov–Schur
//! eigensolver for large operators given only as products.

mod expm;
mod hermitian;
mod krylov;
mod lu;
mod matrix;
mod schur;

pub use expm::{expm_apply, expm_multiply, ExpmOptions, LinearOperator};
pub use hermitian::{
    hermitian_eig, hermitian_eig_with_tol, hermitian_eigenvalues, HermitianEigen, HERMITIAN_TOL,
};
pub use krylov::{dominant_eigenpairs, KrylovOptions, PartialEigen};
pub use lu::{solve, BandLu, BandMatrix, Lu};
pub use matrix::{dot, norm2, ComplexMatrix, C64};
pub use schur::{general_eig, general_eigenvalues, schur, GeneralEigen, Schur};

pub(crate) use matrix::ZERO;

/// Trace distance `½‖A − B‖₁` between two Hermitian matrices.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> crate::Result<f64> {
    let d = (a - b).hermitian_part();
    let ev = hermitian_eigenvalues(&d)?;
    Ok(0.5 * ev.iter().map(|l| l.abs()).sum::<f64>())
}
