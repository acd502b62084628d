//! Quantities read off a density matrix: mean energy against the lab-frame
//! `h_B`, ergotropy through the passive state, and the Wigner function.

mod ergotropy;
mod wigner;

pub use ergotropy::{energy, ergotropy, PassiveDecomposition, CLIP_TOL};
pub use wigner::{wigner, GridAxis, PhaseSpaceGrid, WignerGrid, TAIL_TOL};
