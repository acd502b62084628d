//! Wigner function from the displaced-parity form
//!
//! ```text
//! W(β) = (2/π) Σ_n (−1)ⁿ ⟨n|D†(β) ρ D(β)|n⟩ = (2/π) tr[ρ D(2β) P],
//! ```
//!
//! where `P = (−1)^{b†b}` and `D(β) = exp(βb† − β*b)`. Writing
//! `2β = s e^{iφ}`, `D(2β) = R(φ) exp(−isK) R(φ)†` with `K = i(b† − b)` and
//! `R(φ) = e^{iφ b†b}`. One Hermitian eigendecomposition of `K` in a padded
//! Fock space then serves every grid point.

use serde::{Deserialize, Serialize};

use crate::dynamics::DensityMatrix;
use crate::error::{Error, Result};
use crate::io::{fmt_f64, CsvTable};
use crate::linalg::{hermitian_eig, ComplexMatrix, C64, ZERO};

/// Largest population allowed in the top Fock level.
pub const TAIL_TOL: f64 = 1e-8;
/// Population tail below which levels are dropped from the sum.
const SUPPORT_TAIL: f64 = 1e-24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridAxis {
    pub fn new(min: f64, max: f64, count: usize) -> Self {
        Self { min, max, count }
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let h = self.step();
        let mut v: Vec<f64> = (0..self.count).map(|k| self.min + k as f64 * h).collect();
        v[self.count - 1] = self.max;
        v
    }

    pub fn step(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.max - self.min) / (self.count - 1) as f64
        }
    }

    fn validate(&self, name: &'static str) -> Result<()> {
        let ok = self.count >= 1
            && self.min.is_finite()
            && self.max.is_finite()
            && (self.max > self.min || (self.count == 1 && self.max == self.min));
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter {
                name,
                reason: format!(
                    "axis needs finite min < max and count >= 1 (got {}..{} x {})",
                    self.min, self.max, self.count
                ),
            })
        }
    }
}

/// Rectangular grid of phase-space points `β = x + iy`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceGrid {
    pub re: GridAxis,
    pub im: GridAxis,
}

impl Default for PhaseSpaceGrid {
    fn default() -> Self {
        Self {
            re: GridAxis::new(-4.0, 4.0, 101),
            im: GridAxis::new(-4.0, 4.0, 101),
        }
    }
}

/// `W(β)` sampled on a grid; `values[i][j]` belongs to
/// `β = re_beta[i] + i·im_beta[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub re_beta: Vec<f64>,
    pub im_beta: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct WignerJson<'a> {
    re_beta: GridAxis,
    im_beta: GridAxis,
    /// Rows indexed by `re_beta`.
    values: &'a [Vec<f64>],
}

impl WignerGrid {
    pub fn cell_area(&self) -> f64 {
        axis_step(&self.re_beta) * axis_step(&self.im_beta)
    }

    /// `Σ W ΔA`; close to 1 when the grid covers the state.
    pub fn normalization(&self) -> f64 {
        self.values.iter().flatten().sum::<f64>() * self.cell_area()
    }

    pub fn min(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `∫ W d(Im β)` at each `Re β`.
    pub fn marginal_re(&self) -> Vec<f64> {
        let dy = axis_step(&self.im_beta);
        self.values
            .iter()
            .map(|row| row.iter().sum::<f64>() * dy)
            .collect()
    }

    /// Compact JSON: axis metadata plus the value matrix.
    pub fn to_json(&self) -> Result<String> {
        let axis = |v: &[f64]| GridAxis::new(v[0], v[v.len() - 1], v.len());
        Ok(serde_json::to_string(&WignerJson {
            re_beta: axis(&self.re_beta),
            im_beta: axis(&self.im_beta),
            values: &self.values,
        })?)
    }
}

fn axis_step(v: &[f64]) -> f64 {
    if v.len() < 2 {
        1.0
    } else {
        (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64
    }
}

impl CsvTable for WignerGrid {
    fn header(&self) -> Vec<String> {
        vec!["re_beta".into(), "im_beta".into(), "W".into()]
    }

    fn records(&self) -> Vec<Vec<String>> {
        let mut out = Vec::with_capacity(self.re_beta.len() * self.im_beta.len());
        for (i, x) in self.re_beta.iter().enumerate() {
            for (j, y) in self.im_beta.iter().enumerate() {
                out.push(vec![fmt_f64(*x), fmt_f64(*y), fmt_f64(self.values[i][j])]);
            }
        }
        out
    }
}

/// Samples `W(β)` on `grid`.
pub fn wigner(rho: &DensityMatrix, grid: &PhaseSpaceGrid) -> Result<WignerGrid> {
    grid.re.validate("re_beta")?;
    grid.im.validate("im_beta")?;
    let n = rho.dim();
    let r = rho.matrix();
    let tail = r[(n - 1, n - 1)].re;
    if tail > TAIL_TOL {
        return Err(Error::TruncationInsufficient { tail, dim: n });
    }

    // Effective support: drop levels whose total population is negligible.
    let mut n_eff = n;
    let mut acc = 0.0;
    while n_eff > 1 {
        let p = r[(n_eff - 1, n_eff - 1)].re.max(0.0);
        if acc + p > SUPPORT_TAIL {
            break;
        }
        acc += p;
        n_eff -= 1;
    }

    let xs = grid.re.points();
    let ys = grid.im.points();
    let rmax = xs
        .iter()
        .flat_map(|x| ys.iter().map(move |y| x.hypot(*y)))
        .fold(0.0, f64::max);
    let s_max = 2.0 * rmax;
    let reach = (n_eff as f64).sqrt() + s_max;
    let padded = ((reach * reach + 8.0 * reach + 20.0).ceil() as usize).max(n_eff + 1);

    let mut k = ComplexMatrix::zeros(padded);
    for m in 0..padded - 1 {
        let g = ((m + 1) as f64).sqrt();
        k[(m + 1, m)] = C64::new(0.0, g);
        k[(m, m + 1)] = C64::new(0.0, -g);
    }
    let eig = hermitian_eig(&k)?;
    let v = &eig.eigenvectors;

    // c[k][d + n_eff − 1] = Σ_{m − n = d} (−1)ⁿ ρ_nm V_mk conj(V_nk)
    let width = 2 * n_eff - 1;
    let mut c = vec![ZERO; padded * width];
    for kk in 0..padded {
        let row = &mut c[kk * width..(kk + 1) * width];
        for nn in 0..n_eff {
            let vn = v[(nn, kk)].conj();
            let sign = if nn % 2 == 0 { 1.0 } else { -1.0 };
            for mm in 0..n_eff {
                row[mm + n_eff - 1 - nn] += r[(nn, mm)] * v[(mm, kk)] * vn * sign;
            }
        }
    }

    let mut values = vec![vec![0.0; ys.len()]; xs.len()];
    let mut phase = vec![ZERO; width];
    let mut rot = vec![ZERO; padded];
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            let s = 2.0 * x.hypot(y);
            let phi = y.atan2(x);
            for (d, p) in phase.iter_mut().enumerate() {
                *p = C64::from_polar(1.0, phi * (d as f64 - (n_eff - 1) as f64));
            }
            for (kk, e) in rot.iter_mut().enumerate() {
                *e = C64::from_polar(1.0, -s * eig.eigenvalues[kk]);
            }
            let mut w = ZERO;
            for kk in 0..padded {
                let row = &c[kk * width..(kk + 1) * width];
                let inner: C64 = row.iter().zip(&phase).map(|(a, b)| a * b).sum();
                w += rot[kk] * inner;
            }
            w *= 2.0 / std::f64::consts::PI;
            if w.im.abs() > 1e-10 {
                return Err(Error::InvariantViolation {
                    what: "imaginary part of W",
                    value: w.im,
                });
            }
            values[i][j] = w.re;
        }
    }
    Ok(WignerGrid {
        re_beta: xs,
        im_beta: ys,
        values,
    })
}
