use serde::Serialize;

use super::density::DensityMatrix;
use super::liouvillian::Liouvillian;
use super::propagate::{propagate_with, PropagateOptions};
use crate::error::{Error, Result};
use crate::io::{fmt_f64, CsvTable};
use crate::observables::{energy, ergotropy};

/// Energy and ergotropy along a charging run, with per-point diagnostics.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    pub ergotropy: Vec<f64>,
    /// Largest raw trace drift `|tr ρ − 1|` before any renormalisation.
    pub trace_err: Vec<f64>,
    pub min_eig: Vec<f64>,
    pub purity: Vec<f64>,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Checks equal lengths, increasing times and `𝓔 ≤ E + 1e-8`.
    pub fn validate(&self) -> Result<()> {
        let n = self.times.len();
        for len in [
            self.energy.len(),
            self.ergotropy.len(),
            self.trace_err.len(),
            self.min_eig.len(),
            self.purity.len(),
        ] {
            if len != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: len,
                });
            }
        }
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidTimeGrid);
        }
        for (e, w) in self.energy.iter().zip(&self.ergotropy) {
            if *w > e + 1e-8 {
                return Err(Error::InvariantViolation {
                    what: "ergotropy - energy",
                    value: w - e,
                });
            }
        }
        Ok(())
    }

    /// Index and value of the largest energy sample.
    pub fn energy_max(&self) -> Option<(usize, f64)> {
        self.energy
            .iter()
            .copied()
            .enumerate()
            .fold(None, |best, (i, e)| match best {
                Some((_, b)) if b >= e => best,
                _ => Some((i, e)),
            })
    }
}

impl CsvTable for TrajectoryRecord {
    fn header(&self) -> Vec<String> {
        [
            "tau",
            "energy",
            "ergotropy",
            "trace_err",
            "min_eig",
            "purity",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect()
    }

    fn records(&self) -> Vec<Vec<String>> {
        (0..self.len())
            .map(|i| {
                [
                    self.times[i],
                    self.energy[i],
                    self.ergotropy[i],
                    self.trace_err[i],
                    self.min_eig[i],
                    self.purity[i],
                ]
                .iter()
                .map(|x| fmt_f64(*x))
                .collect()
            })
            .collect()
    }
}

/// Propagates `rho0` over `grid` and records observables against the
/// lab-frame `h_B`. The states themselves are returned alongside.
pub fn charge_trajectory(
    l: &Liouvillian,
    rho0: &DensityMatrix,
    grid: &[f64],
    opts: &PropagateOptions,
) -> Result<(TrajectoryRecord, Vec<DensityMatrix>)> {
    let (states, infos) = propagate_with(l, rho0, grid, opts)?;
    let hb = l.battery_hamiltonian();
    let mut rec = TrajectoryRecord {
        times: grid.to_vec(),
        ..Default::default()
    };
    for (rho, info) in states.iter().zip(&infos) {
        let d = rho.diagnostics()?;
        rec.energy.push(energy(rho, hb)?);
        rec.ergotropy.push(ergotropy(rho, hb)?.0);
        rec.trace_err.push(info.raw_trace_drift.max(d.trace_err));
        rec.min_eig.push(d.min_eig);
        rec.purity.push(d.purity);
    }
    Ok((rec, states))
}
