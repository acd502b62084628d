use super::density::DensityMatrix;
use super::liouvillian::Liouvillian;
use crate::error::{Error, Result};
use crate::linalg::{expm_multiply, ComplexMatrix, ExpmOptions, C64, ZERO};

/// Default local error tolerance (absolute and relative).
pub const DEFAULT_TOL: f64 = 1e-9;
/// Trace drift above which the state is renormalised after a step.
pub const TRACE_RENORM: f64 = 1e-12;
/// Trace drift that aborts the run.
pub const TRACE_ABORT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    /// Adaptive Dormand–Prince 5(4).
    #[default]
    Rk45,
    /// `exp(Δτ 𝓛)` applied between grid points.
    Exact,
}

#[derive(Debug, Clone, Copy)]
pub struct PropagateOptions {
    pub integrator: Integrator,
    pub tol: f64,
    /// Step count cap per grid interval.
    pub max_steps: usize,
}

impl Default for PropagateOptions {
    fn default() -> Self {
        Self {
            integrator: Integrator::Rk45,
            tol: DEFAULT_TOL,
            max_steps: 1_000_000,
        }
    }
}

/// Per-grid-point integrator diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub tau: f64,
    /// Largest trace drift seen before renormalisation since the last grid point.
    pub raw_trace_drift: f64,
    pub accepted: usize,
    pub rejected: usize,
}

/// `count` evenly spaced points from `start` to `stop` inclusive.
pub fn uniform_grid(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    if count == 0 || !start.is_finite() || !stop.is_finite() || start < 0.0 {
        return Err(Error::InvalidTimeGrid);
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    if stop <= start {
        return Err(Error::InvalidTimeGrid);
    }
    let h = (stop - start) / (count - 1) as f64;
    let mut g: Vec<f64> = (0..count).map(|k| start + k as f64 * h).collect();
    g[count - 1] = stop;
    Ok(g)
}

/// `ρ(τ)` at each grid point with default options and the given tolerance.
pub fn propagate(
    l: &Liouvillian,
    rho0: &DensityMatrix,
    grid: &[f64],
    tol: f64,
) -> Result<Vec<DensityMatrix>> {
    let opts = PropagateOptions {
        tol,
        ..Default::default()
    };
    propagate_with(l, rho0, grid, &opts).map(|(s, _)| s)
}

pub fn propagate_with(
    l: &Liouvillian,
    rho0: &DensityMatrix,
    grid: &[f64],
    opts: &PropagateOptions,
) -> Result<(Vec<DensityMatrix>, Vec<StepInfo>)> {
    check_grid(grid)?;
    let n = l.dim();
    if rho0.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: rho0.dim(),
        });
    }
    if !(opts.tol > 0.0) || !opts.tol.is_finite() {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: format!("must be finite and > 0, got {}", opts.tol),
        });
    }

    let mut states = Vec::with_capacity(grid.len());
    let mut infos = Vec::with_capacity(grid.len());
    let mut y = rho0.matrix().as_slice().to_vec();
    let mut t = 0.0;
    let mut rk = Dopri::new(n * n, opts.tol);

    for &target in grid {
        let mut info = StepInfo {
            tau: target,
            raw_trace_drift: 0.0,
            accepted: 0,
            rejected: 0,
        };
        if target > t {
            match opts.integrator {
                Integrator::Rk45 => rk.advance(l, &mut y, t, target, opts.max_steps, &mut info)?,
                Integrator::Exact => {
                    let e = ExpmOptions::default();
                    y = expm_multiply(l, &y, target - t, &e)?;
                    info.accepted = 1;
                    let drift = stabilise(&mut y, n)?;
                    info.raw_trace_drift = drift;
                }
            }
            t = target;
        }
        let m = ComplexMatrix::from_col_major(n, y.clone())?;
        states.push(DensityMatrix::from_trusted(m));
        infos.push(info);
    }
    Ok((states, infos))
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || !(grid[0] >= 0.0) {
        return Err(Error::InvalidTimeGrid);
    }
    if grid.iter().any(|t| !t.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidTimeGrid);
    }
    Ok(())
}

/// Hermitises in place and renormalises the trace if it drifted more than
/// [`TRACE_RENORM`]. Returns the raw drift.
fn stabilise(y: &mut [C64], n: usize) -> Result<f64> {
    for j in 0..n {
        for i in 0..j {
            let a = y[i + j * n];
            let b = y[j + i * n];
            let h = 0.5 * (a + b.conj());
            y[i + j * n] = h;
            y[j + i * n] = h.conj();
        }
        y[j + j * n].im = 0.0;
    }
    let tr: f64 = (0..n).map(|i| y[i + i * n].re).sum();
    if !tr.is_finite() {
        return Err(Error::NonFinite);
    }
    let drift = (tr - 1.0).abs();
    if drift > TRACE_ABORT {
        return Err(Error::InvariantViolation {
            what: "trace",
            value: drift,
        });
    }
    if drift > TRACE_RENORM {
        let s = 1.0 / tr;
        y.iter_mut().for_each(|z| *z *= s);
    }
    Ok(drift)
}

// Dormand–Prince 5(4) tableau; the system is autonomous so nodes are unused.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Dopri {
    tol: f64,
    k: [Vec<C64>; 7],
    stage: Vec<C64>,
    ynew: Vec<C64>,
    h: Option<f64>,
    err_prev: f64,
    fsal_valid: bool,
}

impl Dopri {
    fn new(len: usize, tol: f64) -> Self {
        Self {
            tol,
            k: std::array::from_fn(|_| vec![ZERO; len]),
            stage: vec![ZERO; len],
            ynew: vec![ZERO; len],
            h: None,
            err_prev: 1e-4,
            fsal_valid: false,
        }
    }

    fn initial_step(&mut self, l: &Liouvillian, y: &[C64]) -> f64 {
        // Hairer–Wanner starting heuristic.
        let sc = |v: f64| self.tol + self.tol * v.abs();
        let d0 = rms(y.iter().map(|z| z.norm() / sc(z.norm())));
        l.apply_vec(y, &mut self.k[0]);
        let d1 = rms(y
            .iter()
            .zip(&self.k[0])
            .map(|(z, f)| f.norm() / sc(z.norm())));
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        for (s, (yi, fi)) in self.stage.iter_mut().zip(y.iter().zip(&self.k[0])) {
            *s = yi + fi * h0;
        }
        l.apply_vec(&self.stage, &mut self.k[1]);
        let d2 = rms(y
            .iter()
            .zip(self.k[1].iter().zip(&self.k[0]))
            .map(|(z, (f1, f0))| (f1 - f0).norm() / sc(z.norm())))
            / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        self.fsal_valid = true;
        (100.0 * h0).min(h1)
    }

    fn advance(
        &mut self,
        l: &Liouvillian,
        y: &mut Vec<C64>,
        t0: f64,
        t1: f64,
        max_steps: usize,
        info: &mut StepInfo,
    ) -> Result<()> {
        let n = l.dim();
        let mut t = t0;
        if self.h.is_none() {
            let h = self.initial_step(l, y);
            self.h = Some(h);
        }
        let mut h = self.h.unwrap();
        let mut steps = 0usize;
        while t < t1 {
            steps += 1;
            if steps > max_steps {
                return Err(Error::StepSizeUnderflow { tau: t, step: h });
            }
            let remaining = t1 - t;
            let last = h >= remaining * (1.0 - 1e-12);
            let step = if last { remaining } else { h };
            if step <= 16.0 * f64::EPSILON * t.abs().max(1.0) {
                return Err(Error::StepSizeUnderflow { tau: t, step });
            }
            if !self.fsal_valid {
                l.apply_vec(y, &mut self.k[0]);
                self.fsal_valid = true;
            }
            for s in 1..7 {
                for i in 0..y.len() {
                    let mut acc = ZERO;
                    for (j, a) in A[s][..s].iter().enumerate() {
                        if *a != 0.0 {
                            acc += self.k[j][i] * *a;
                        }
                    }
                    let target = if s == 6 {
                        &mut self.ynew
                    } else {
                        &mut self.stage
                    };
                    target[i] = y[i] + acc * step;
                }
                let src = if s == 6 { &self.ynew } else { &self.stage };
                l.apply_vec(src, &mut self.k[s]);
            }
            let mut err = 0.0f64;
            for i in 0..y.len() {
                let mut e = ZERO;
                for (j, w) in E.iter().enumerate() {
                    if *w != 0.0 {
                        e += self.k[j][i] * *w;
                    }
                }
                let sc = self.tol + self.tol * y[i].norm().max(self.ynew[i].norm());
                err = err.max((e * step).norm() / sc);
            }
            if !err.is_finite() {
                return Err(Error::NonFinite);
            }
            if err <= 1.0 {
                // PI controller.
                let fac = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.7 / 5.0) * self.err_prev.powf(0.4 / 5.0)).clamp(0.2, 5.0)
                };
                self.err_prev = err.max(1e-4);
                std::mem::swap(y, &mut self.ynew);
                self.k.swap(0, 6);
                t = if last { t1 } else { t + step };
                info.accepted += 1;
                let drift = stabilise(y, n)?;
                info.raw_trace_drift = info.raw_trace_drift.max(drift);
                if drift > TRACE_RENORM {
                    self.fsal_valid = false;
                }
                if !last || fac < 1.0 {
                    h = step * fac;
                }
            } else {
                info.rejected += 1;
                h = step * (0.9 * err.powf(-0.2)).max(0.2);
            }
        }
        self.h = Some(h);
        Ok(())
    }
}

fn rms(it: impl Iterator<Item = f64>) -> f64 {
    let (s, c) = it.fold((0.0, 0usize), |(s, c), v| (s + v * v, c + 1));
    if c == 0 {
        0.0
    } else {
        (s / c as f64).sqrt()
    }
}
