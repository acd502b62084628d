//! Lindblad dynamics of the driven, damped battery in the rotating frame:
//!
//! ```text
//! dρ/dt = 𝓛ρ = −i[H, ρ] + γ (b ρ b† − ½{b†b, ρ})
//! ```
//!
//! Superoperators act on column-stacked density matrices with
//! `vec(AXB) = (Bᵀ ⊗ A) vec(X)`.

mod density;
mod liouvillian;
mod propagate;
mod taylor;
mod trajectory;

pub use density::{DensityMatrix, StateDiagnostics, HERMITICITY_TOL, PSD_TOL, TRACE_TOL};
pub use liouvillian::{build_liouvillian, Liouvillian};
pub use propagate::{
    propagate, propagate_with, uniform_grid, Integrator, PropagateOptions, StepInfo, DEFAULT_TOL,
    TRACE_ABORT, TRACE_RENORM,
};
pub use taylor::{convergence_order, short_time_check, taylor_series, taylor_term, vacuum_terms};
pub use trajectory::{charge_trajectory, TrajectoryRecord};

use crate::error::Result;
use crate::linalg::ComplexMatrix;

/// `dρ/dt` for a density matrix, as an `N×N` matrix.
pub fn apply_lindbladian(l: &Liouvillian, rho: &DensityMatrix) -> Result<ComplexMatrix> {
    l.apply_matrix(rho.matrix())
}
