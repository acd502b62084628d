//! Truncated Fock-space operators and Hamiltonians of the saturable battery.
//!
//! The lab-frame battery Hamiltonian is
//!
//! ```text
//! h_B = ω b†b + χ b†b / (1 + n_s b†b)
//! ```
//!
//! with spectrum `E_n = ω n + χ n / (1 + n_s n)`. Under a drive of frequency
//! `Ω` the rotating-frame Hamiltonian is time independent,
//!
//! ```text
//! H = Δ b†b + χ b†b / (1 + n_s b†b) + α (b + b†),   Δ = ω − Ω.
//! ```
//!
//! Expanding the fraction to second order in `n_s` gives the Kerr
//! comparison `E_n^Kerr = (ω + χ) n − n_s χ n²`, which is only meaningful
//! while the quadratic term stays small against the linear one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{fmt_f64, CsvTable};
use crate::linalg::{ComplexMatrix, C64};

pub const MIN_DIM: usize = 2;

/// Physical parameters plus the Fock truncation.
///
/// `ω` and `Δ` are stored; the drive frequency is derived as `Ω = ω − Δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub omega: f64,
    pub detuning: f64,
    pub chi: f64,
    pub n_s: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub dim: usize,
}

impl Default for ModelParams {
    /// The charging parameters `ω = 1, Δ = 0.1, χ = 1, α = 0.5, γ = 0.2`
    /// with `n_s = 1` and a 40-level truncation.
    fn default() -> Self {
        Self {
            omega: 1.0,
            detuning: 0.1,
            chi: 1.0,
            n_s: 1.0,
            alpha: 0.5,
            gamma: 0.2,
            dim: 40,
        }
    }
}

impl ModelParams {
    pub fn drive_freq(&self) -> f64 {
        self.omega - self.detuning
    }

    /// Sets `Ω`, keeping `ω` and updating `Δ`.
    pub fn set_drive_freq(&mut self, drive: f64) {
        self.detuning = self.omega - drive;
    }

    /// Sets `ω`, keeping `Ω` fixed.
    pub fn set_omega_keep_drive(&mut self, omega: f64) {
        let drive = self.drive_freq();
        self.omega = omega;
        self.detuning = omega - drive;
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("omega", self.omega),
            ("detuning", self.detuning),
            ("chi", self.chi),
            ("n_s", self.n_s),
            ("alpha", self.alpha),
            ("gamma", self.gamma),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite, got {v}"),
                });
            }
        }
        if self.n_s < 0.0 {
            return Err(Error::InvalidParameter {
                name: "n_s",
                reason: format!("must be >= 0, got {}", self.n_s),
            });
        }
        if self.gamma < 0.0 {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: format!("must be >= 0, got {}", self.gamma),
            });
        }
        if self.dim < MIN_DIM {
            return Err(Error::DimensionTooSmall {
                dim: self.dim,
                min: MIN_DIM,
            });
        }
        Ok(())
    }

    /// Saturable level `E_n` of the battery Hamiltonian.
    pub fn level(&self, n: usize) -> f64 {
        saturable_level(self.omega, self.chi, self.n_s, n)
    }

    pub fn kerr_level(&self, n: usize) -> f64 {
        kerr_level(self.omega, self.chi, self.n_s, n)
    }
}

/// `E_n = ω n + χ n / (1 + n_s n)`.
pub fn saturable_level(omega: f64, chi: f64, n_s: f64, n: usize) -> f64 {
    let n = n as f64;
    omega * n + chi * n / (1.0 + n_s * n)
}

/// Second-order expansion `(ω + χ) n − n_s χ n²`.
pub fn kerr_level(omega: f64, chi: f64, n_s: f64, n: usize) -> f64 {
    let n = n as f64;
    (omega + chi) * n - n_s * chi * n * n
}

/// Annihilation operator `b` on `N` Fock levels: `⟨n−1|b|n⟩ = √n`.
pub fn annihilation(dim: usize) -> Result<ComplexMatrix> {
    if dim < MIN_DIM {
        return Err(Error::DimensionTooSmall { dim, min: MIN_DIM });
    }
    let mut b = ComplexMatrix::zeros(dim);
    for n in 1..dim {
        b[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    Ok(b)
}

/// `b†b` as an exact diagonal.
pub fn number_operator(dim: usize) -> Result<ComplexMatrix> {
    if dim < MIN_DIM {
        return Err(Error::DimensionTooSmall { dim, min: MIN_DIM });
    }
    let diag: Vec<f64> = (0..dim).map(|n| n as f64).collect();
    Ok(ComplexMatrix::from_real_diag(&diag))
}

/// Lab-frame `h_B`, diagonal in the number basis. The operator fraction is
/// evaluated entrywise on occupation numbers, which is exact because `b†b`
/// is diagonal.
pub fn battery_hamiltonian(p: &ModelParams) -> Result<ComplexMatrix> {
    p.validate()?;
    let diag: Vec<f64> = (0..p.dim).map(|n| p.level(n)).collect();
    Ok(ComplexMatrix::from_real_diag(&diag))
}

/// Rotating-frame Hamiltonian `H`: diagonal `Δn + χn/(1 + n_s n)` and
/// couplings `α√n` between `n−1` and `n`.
pub fn rotating_hamiltonian(p: &ModelParams) -> Result<ComplexMatrix> {
    p.validate()?;
    let mut h = ComplexMatrix::zeros(p.dim);
    for n in 0..p.dim {
        h[(n, n)] = C64::new(saturable_level(p.detuning, p.chi, p.n_s, n), 0.0);
        if n > 0 {
            let g = C64::new(p.alpha * (n as f64).sqrt(), 0.0);
            h[(n - 1, n)] = g;
            h[(n, n - 1)] = g;
        }
    }
    Ok(h)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub n: usize,
    pub energy: f64,
    /// Present only when the Kerr comparison was requested.
    pub energy_kerr: Option<f64>,
}

/// Levels `E_n` for `n = 0..N−1`, optionally with the Kerr approximation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    pub rows: Vec<SpectrumRow>,
}

impl SpectrumTable {
    pub fn has_kerr(&self) -> bool {
        self.rows.first().is_some_and(|r| r.energy_kerr.is_some())
    }

    /// Number of levels with `E_n ≤ e_max`.
    pub fn count_below(&self, e_max: f64) -> usize {
        self.rows.iter().filter(|r| r.energy <= e_max).count()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.energy).collect()
    }
}

impl CsvTable for SpectrumTable {
    fn header(&self) -> Vec<String> {
        let mut h = vec!["n".to_string(), "E_n".to_string()];
        if self.has_kerr() {
            h.push("E_n_kerr".to_string());
        }
        h
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                let mut rec = vec![r.n.to_string(), fmt_f64(r.energy)];
                if let Some(k) = r.energy_kerr {
                    rec.push(fmt_f64(k));
                }
                rec
            })
            .collect()
    }
}

pub fn spectrum_table(p: &ModelParams, include_kerr: bool) -> Result<SpectrumTable> {
    p.validate()?;
    let rows = (0..p.dim)
        .map(|n| SpectrumRow {
            n,
            energy: p.level(n),
            energy_kerr: include_kerr.then(|| p.kerr_level(n)),
        })
        .collect();
    Ok(SpectrumTable { rows })
}
