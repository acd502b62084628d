//! Simulation engine for a driven-dissipative bosonic quantum battery with a
//! saturable nonlinearity `χ n / (1 + n_s n)`.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: dense complex kernels (eigensolvers, LU, `exp(tA)v`).
//! - [`model`]: truncated Fock-space operators, Hamiltonians and spectra.
//! - [`dynamics`]: the Lindbladian, time propagation and short-time Taylor terms.
//! - [`observables`]: energy, ergotropy via passive states, Wigner functions.
//! - [`steadystate`]: Liouvillian spectrum, steady states and charging maxima.

pub mod dynamics;
pub mod error;
pub mod io;
pub mod linalg;
pub mod model;
pub mod observables;
pub mod steadystate;

pub use dynamics::{DensityMatrix, Liouvillian, TrajectoryRecord};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
pub use model::{ModelParams, SpectrumTable};
pub use observables::{PassiveDecomposition, WignerGrid};
pub use steadystate::{LiouvillianSpectrum, SteadyStateResult};
