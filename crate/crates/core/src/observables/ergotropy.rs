use serde::Serialize;

use crate::dynamics::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, hermitian_eigenvalues, ComplexMatrix};

/// Eigenvalues of `ρ` down to `−CLIP_TOL` are treated as zero.
pub const CLIP_TOL: f64 = 1e-8;

/// The passive state `σ = Σ_n λ_n |E_n⟩⟨E_n|`, pairing the largest
/// population with the lowest level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PassiveDecomposition {
    /// Eigenvalues of `ρ`, clipped, renormalised and sorted descending.
    pub probs: Vec<f64>,
    /// Eigenvalues of `h_B`, ascending.
    pub levels: Vec<f64>,
    pub passive_energy: f64,
}

fn check_dims(rho: &DensityMatrix, hb: &ComplexMatrix) -> Result<()> {
    if hb.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: hb.dim(),
        });
    }
    Ok(())
}

/// `tr[h_B ρ]`.
pub fn energy(rho: &DensityMatrix, hb: &ComplexMatrix) -> Result<f64> {
    check_dims(rho, hb)?;
    let n = rho.dim();
    let r = rho.matrix();
    let mut e = crate::linalg::C64::new(0.0, 0.0);
    for j in 0..n {
        for i in 0..n {
            e += hb[(i, j)] * r[(j, i)];
        }
    }
    if e.im.abs() > 1e-10 * (1.0 + e.re.abs()) {
        return Err(Error::InvariantViolation {
            what: "imaginary part of tr[h_B rho]",
            value: e.im,
        });
    }
    Ok(e.re)
}

/// `𝓔 = tr[h_B ρ] − tr[h_B σ]` together with the passive state `σ`.
pub fn ergotropy(rho: &DensityMatrix, hb: &ComplexMatrix) -> Result<(f64, PassiveDecomposition)> {
    check_dims(rho, hb)?;
    let e = energy(rho, hb)?;
    let levels = hermitian_eig(hb)?.eigenvalues;
    let mut probs = hermitian_eigenvalues(&rho.matrix().hermitian_part())?;
    if let Some(&min) = probs.first() {
        if min < -CLIP_TOL {
            return Err(Error::InvalidState(format!(
                "eigenvalue {min:.3e} below the clipping tolerance -{CLIP_TOL:e}"
            )));
        }
    }
    probs.iter_mut().for_each(|p| *p = p.max(0.0));
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    // Stable: ties keep their order, and either order gives the same sum.
    probs.sort_by(|a, b| b.total_cmp(a));
    let passive_energy = probs.iter().zip(&levels).map(|(p, l)| p * l).sum();
    Ok((
        e - passive_energy,
        PassiveDecomposition {
            probs,
            levels,
            passive_energy,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{battery_hamiltonian, ModelParams};

    fn hb(n_s: f64, dim: usize) -> ComplexMatrix {
        battery_hamiltonian(&ModelParams {
            omega: 1.0,
            chi: 1.0,
            n_s,
            dim,
            ..ModelParams::default()
        })
        .unwrap()
    }

    #[test]
    fn ground_and_fock_energies() {
        let h = hb(1.0, 5);
        assert_eq!(energy(&DensityMatrix::ground(5), &h).unwrap(), 0.0);
        let e2 = energy(&DensityMatrix::fock(5, 2).unwrap(), &h).unwrap();
        assert!((e2 - 8.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn inverted_two_level_mixture() {
        let h = hb(0.0, 3);
        let rho = DensityMatrix::diagonal(&[0.3, 0.7, 0.0]).unwrap();
        let (erg, pd) = ergotropy(&rho, &h).unwrap();
        assert!((energy(&rho, &h).unwrap() - 1.4).abs() < 1e-14);
        assert!((pd.passive_energy - 0.6).abs() < 1e-14);
        assert!((erg - 0.8).abs() < 1e-14);
    }

    #[test]
    fn passive_input_has_no_ergotropy() {
        let h = hb(0.5, 4);
        let rho = DensityMatrix::diagonal(&[0.4, 0.3, 0.2, 0.1]).unwrap();
        assert!(ergotropy(&rho, &h).unwrap().0.abs() < 1e-15);
    }

    #[test]
    fn excited_state_ergotropy_is_its_energy() {
        let h = hb(1.0, 4);
        let (erg, pd) = ergotropy(&DensityMatrix::fock(4, 1).unwrap(), &h).unwrap();
        assert!((erg - 1.5).abs() < 1e-14);
        assert_eq!(pd.probs[0], 1.0);
    }

    #[test]
    fn degenerate_probabilities() {
        let h = hb(1.0, 4);
        let a = DensityMatrix::diagonal(&[0.1, 0.3, 0.3, 0.3]).unwrap();
        let b = DensityMatrix::diagonal(&[0.3, 0.3, 0.1, 0.3]).unwrap();
        let pa = ergotropy(&a, &h).unwrap().1.passive_energy;
        let pb = ergotropy(&b, &h).unwrap().1.passive_energy;
        assert!((pa - pb).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            energy(&DensityMatrix::ground(3), &hb(1.0, 4)),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
