//! Liouvillian spectrum, the steady state and charging maxima.
//!
//! Eigenvalues are ordered by ascending `|Re λ|` with ties broken by
//! ascending `|Im λ|`. The ordering is non-strict: complex-conjugate pairs
//! share a real part.

use serde::Serialize;

use crate::dynamics::{
    build_liouvillian, propagate_with, uniform_grid, DensityMatrix, Integrator, Liouvillian,
    PropagateOptions,
};
use crate::error::{Error, Result};
use crate::io::{fmt_f64, CsvTable};
use crate::linalg::{
    dominant_eigenpairs, dot, expm_multiply, general_eig, hermitian_eig, norm2, trace_distance,
    BandMatrix, ComplexMatrix, ExpmOptions, KrylovOptions, LinearOperator, Lu, C64, ZERO,
};
use crate::model::ModelParams;
use crate::observables::{energy, ergotropy};

/// `|Re λ|` at or below this counts as a zero mode.
pub const ZERO_MODE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMethod {
    /// Full eigendecomposition of the dense superoperator.
    Dense,
    /// `γ = 0`: eigenvalues `−i(E_a − E_b)` from the Hamiltonian.
    Unitary,
    /// Krylov–Schur on the propagator `exp(T𝓛)`.
    Krylov,
}

#[derive(Debug, Clone, Copy)]
pub struct SpectrumOptions {
    /// Use the dense path when `N²` is at most this.
    pub dense_limit: usize,
    /// Propagator time `T` for the Krylov path.
    pub propagator_time: f64,
    /// Relative residual tolerance for Krylov Ritz pairs.
    pub krylov_tol: f64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            dense_limit: 400,
            propagator_time: 1.0,
            krylov_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LiouvillianSpectrum {
    pub eigenvalues: Vec<C64>,
    /// Right eigen-operators `ρ_n`, unit Frobenius norm.
    pub right_ops: Vec<ComplexMatrix>,
    /// `|Re λ_1|`; zero when fewer than two eigenvalues were requested.
    pub spectral_gap: f64,
    /// `‖𝓛ρ_n − λ_n ρ_n‖_F`.
    pub residuals: Vec<f64>,
    pub method: SpectrumMethod,
}

impl LiouvillianSpectrum {
    /// Number of eigenvalues with `|Re λ| ≤ ZERO_MODE_TOL`.
    pub fn zero_modes(&self) -> usize {
        self.eigenvalues
            .iter()
            .filter(|l| l.re.abs() <= ZERO_MODE_TOL)
            .count()
    }
}

fn order(a: &C64, b: &C64) -> std::cmp::Ordering {
    a.re.abs()
        .total_cmp(&b.re.abs())
        .then(a.im.abs().total_cmp(&b.im.abs()))
}

/// The `k` eigenvalues of smallest `|Re λ|` with their eigen-operators.
pub fn liouvillian_spectrum(l: &Liouvillian, k: usize) -> Result<LiouvillianSpectrum> {
    liouvillian_spectrum_with(l, k, &SpectrumOptions::default())
}

pub fn liouvillian_spectrum_with(
    l: &Liouvillian,
    k: usize,
    opts: &SpectrumOptions,
) -> Result<LiouvillianSpectrum> {
    let n = l.dim();
    let n2 = n * n;
    if k == 0 || k > n2 {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: format!("must lie in 1..={n2}, got {k}"),
        });
    }
    let (pairs, method) = if l.gamma() == 0.0 {
        (unitary_pairs(l)?, SpectrumMethod::Unitary)
    } else if n2 <= opts.dense_limit {
        (dense_pairs(l)?, SpectrumMethod::Dense)
    } else {
        (krylov_pairs(l, k, opts)?, SpectrumMethod::Krylov)
    };
    let mut pairs = pairs;
    pairs.sort_by(|a, b| order(&a.0, &b.0));
    pairs.truncate(k);

    let mut eigenvalues = Vec::with_capacity(k);
    let mut right_ops = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    let mut buf = vec![ZERO; n2];
    for (lambda, v) in pairs {
        l.apply_vec(&v, &mut buf);
        let r = buf
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - lambda * b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        eigenvalues.push(lambda);
        residuals.push(r);
        right_ops.push(ComplexMatrix::from_col_major(n, v)?);
    }
    let spectral_gap = eigenvalues.get(1).map_or(0.0, |l| l.re.abs());
    Ok(LiouvillianSpectrum {
        eigenvalues,
        right_ops,
        spectral_gap,
        residuals,
        method,
    })
}

type Pair = (C64, Vec<C64>);

fn unitary_pairs(l: &Liouvillian) -> Result<Vec<Pair>> {
    let n = l.dim();
    let eig = hermitian_eig(l.hamiltonian())?;
    let v = &eig.eigenvectors;
    let mut out = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let lambda = C64::new(0.0, -(eig.eigenvalues[a] - eig.eigenvalues[b]));
            // vec(|a⟩⟨b|) = conj(v_b) ⊗ v_a
            let mut op = vec![ZERO; n * n];
            for j in 0..n {
                let cb = v[(j, b)].conj();
                for i in 0..n {
                    op[i + j * n] = v[(i, a)] * cb;
                }
            }
            out.push((lambda, op));
        }
    }
    Ok(out)
}

fn dense_pairs(l: &Liouvillian) -> Result<Vec<Pair>> {
    let eig = general_eig(l.superoperator())?;
    Ok(eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(j, &lam)| (lam, eig.eigenvectors.column(j).to_vec()))
        .collect())
}

/// `exp(T𝓛)` as an operator; its dominant eigenvalues `e^{Tλ}` are exactly
/// the modes of smallest `|Re λ|`.
struct Propagator<'a> {
    l: &'a Liouvillian,
    t: f64,
}

impl LinearOperator for Propagator<'_> {
    fn dim(&self) -> usize {
        LinearOperator::dim(self.l)
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        let out = expm_multiply(self.l, x, self.t, &ExpmOptions::default())
            .expect("propagator time is validated");
        y.copy_from_slice(&out);
    }

    fn norm1(&self) -> f64 {
        (self.t * LinearOperator::norm1(self.l)).exp()
    }
}

fn krylov_pairs(l: &Liouvillian, k: usize, opts: &SpectrumOptions) -> Result<Vec<Pair>> {
    let t = opts.propagator_time;
    if !(t > 0.0)
        || !t.is_finite()
        || t * LinearOperator::norm1(l) > ExpmOptions::default().safety_bound
    {
        return Err(Error::InvalidParameter {
            name: "propagator_time",
            reason: format!("must be finite, > 0 and keep T‖𝓛‖₁ bounded, got {t}"),
        });
    }
    let n = l.dim();
    let op = Propagator { l, t };
    // Two extra pairs so a conjugate partner is never split off at the cut.
    let nev = (k + 2).min(n * n);
    let mut kopts = KrylovOptions::for_nev(nev);
    kopts.tol = opts.krylov_tol;
    // Deterministic start with weight on every entry.
    let start: Vec<C64> = (0..n * n)
        .map(|i| {
            C64::new(
                1.0 + 0.1 * ((i * 7) % 13) as f64,
                0.05 * ((i * 3) % 11) as f64,
            )
        })
        .collect();
    let part = dominant_eigenpairs(&op, &start, &kopts)?;
    let mut buf = vec![ZERO; n * n];
    Ok(part
        .vectors
        .into_iter()
        .map(|v| {
            l.apply_vec(&v, &mut buf);
            let lambda = dot(&v, &buf) / dot(&v, &v);
            (lambda, v)
        })
        .collect())
}

/// Steady state with observables and cross-check diagnostics.
#[derive(Debug, Clone)]
pub struct SteadyStateResult {
    pub rho_ss: DensityMatrix,
    pub energy_ss: f64,
    pub ergotropy_ss: f64,
    /// `‖𝓛ρ_ss‖_F`.
    pub residual: f64,
    /// `‖𝓛‖_F`, the scale for `residual`.
    pub liouvillian_norm: f64,
    pub spectral_gap: f64,
    /// Trace distance between the linear-solve and eigenvector routes.
    pub route_distance: f64,
}

/// Solves `𝓛ρ = 0` as a linear system, then checks uniqueness and the
/// result against the zero-mode eigenvector.
pub fn steady_state(l: &Liouvillian) -> Result<SteadyStateResult> {
    steady_state_with(l, &SpectrumOptions::default())
}

pub fn steady_state_with(l: &Liouvillian, opts: &SpectrumOptions) -> Result<SteadyStateResult> {
    if l.gamma() == 0.0 {
        return Err(Error::NoRelaxation);
    }
    let n = l.dim();
    let spec = liouvillian_spectrum_with(l, 2.min(n * n), opts)?;
    let zero = spec.zero_modes();
    if zero > 1 {
        return Err(Error::DegenerateSteadyState {
            count: zero,
            threshold: ZERO_MODE_TOL,
        });
    }

    let x = match bordered_solve(l) {
        Ok(x) => x,
        Err(Error::SingularMatrix { .. }) => trace_row_solve(l)?,
        Err(e) => return Err(e),
    };
    let mut m = ComplexMatrix::from_col_major(n, x)?.hermitian_part();
    let tr = m.trace().re;
    if !(tr.abs() > 0.0) {
        return Err(Error::InvariantViolation {
            what: "steady-state trace",
            value: tr,
        });
    }
    m = m.scale_real(1.0 / tr);
    let rho = DensityMatrix::new(m)?;

    let mut buf = vec![ZERO; n * n];
    l.apply_vec(rho.matrix().as_slice(), &mut buf);
    let residual = norm2(&buf);

    let mut eig_state = spec.right_ops[0].clone();
    let etr = eig_state.trace();
    eig_state = eig_state.scale(C64::new(1.0, 0.0) / etr).hermitian_part();
    let route_distance = trace_distance(rho.matrix(), &eig_state)?;

    let hb = l.battery_hamiltonian();
    let energy_ss = energy(&rho, hb)?;
    let ergotropy_ss = ergotropy(&rho, hb)?.0;
    Ok(SteadyStateResult {
        rho_ss: rho,
        energy_ss,
        ergotropy_ss,
        residual,
        liouvillian_norm: superoperator_frobenius(l),
        spectral_gap: spec.spectral_gap,
        route_distance,
    })
}

fn superoperator_frobenius(l: &Liouvillian) -> f64 {
    l.superoperator_triplets()
        .iter()
        .map(|t| t.2.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Banded solve with the `(𝓛ρ)_00 = 0` equation, which is redundant under
/// trace preservation, replaced by `ρ_00 = 1`.
fn bordered_solve(l: &Liouvillian) -> Result<Vec<C64>> {
    let n2 = l.dim() * l.dim();
    let mut band: BandMatrix = l.band_matrix();
    band.set_unit_row(0);
    let lu = band.factor()?;
    let mut rhs = vec![ZERO; n2];
    rhs[0] = C64::new(1.0, 0.0);
    Ok(lu.solve(&rhs))
}

/// Dense fallback: row 0 replaced by the trace functional.
fn trace_row_solve(l: &Liouvillian) -> Result<Vec<C64>> {
    let n = l.dim();
    let mut a = l.superoperator().clone();
    for c in 0..n * n {
        a[(0, c)] = ZERO;
    }
    for i in 0..n {
        a[(0, i * (n + 1))] = C64::new(1.0, 0.0);
    }
    let mut rhs = vec![ZERO; n * n];
    rhs[0] = C64::new(1.0, 0.0);
    Ok(Lu::factor(&a)?.solve(&rhs))
}

/// One row of a steady-state sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyStateRow {
    pub n_s: f64,
    pub gamma: f64,
    #[serde(rename = "E_ss")]
    pub energy_ss: f64,
    pub ergotropy_ss: f64,
    pub spectral_gap: f64,
    pub residual: f64,
}

impl SteadyStateResult {
    pub fn row(&self, p: &ModelParams) -> SteadyStateRow {
        SteadyStateRow {
            n_s: p.n_s,
            gamma: p.gamma,
            energy_ss: self.energy_ss,
            ergotropy_ss: self.ergotropy_ss,
            spectral_gap: self.spectral_gap,
            residual: self.residual,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SteadyStateTable {
    pub rows: Vec<SteadyStateRow>,
}

impl CsvTable for SteadyStateTable {
    fn header(&self) -> Vec<String> {
        [
            "n_s",
            "gamma",
            "E_ss",
            "ergotropy_ss",
            "spectral_gap",
            "residual",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect()
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                [
                    r.n_s,
                    r.gamma,
                    r.energy_ss,
                    r.ergotropy_ss,
                    r.spectral_gap,
                    r.residual,
                ]
                .iter()
                .map(|x| fmt_f64(*x))
                .collect()
            })
            .collect()
    }
}

/// Location of the largest energy over `[0, τ_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyMaximum {
    pub tau_star: f64,
    pub energy: f64,
    /// True when the maximum sits on an end of the interval.
    pub at_boundary: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct MaxEnergyOptions {
    /// Coarse scan spacing.
    pub coarse_step: f64,
    /// Final bracket width of the refinement.
    pub tau_tol: f64,
    pub propagate: PropagateOptions,
}

impl Default for MaxEnergyOptions {
    fn default() -> Self {
        Self {
            coarse_step: 0.05,
            tau_tol: 1e-4,
            propagate: PropagateOptions::default(),
        }
    }
}

/// `max_τ E(τ)` from `|0⟩⟨0|` over `[0, τ_max]`.
pub fn max_energy(p: &ModelParams, tau_max: f64) -> Result<EnergyMaximum> {
    max_energy_with(p, tau_max, &MaxEnergyOptions::default())
}

/// Coarse scan followed by golden-section search. Each refinement sample is
/// an exact short propagation from the nearest coarse state on the left, so
/// no interpolation error enters the maximum.
pub fn max_energy_with(
    p: &ModelParams,
    tau_max: f64,
    opts: &MaxEnergyOptions,
) -> Result<EnergyMaximum> {
    if !(tau_max > 0.0) || !tau_max.is_finite() {
        return Err(Error::InvalidParameter {
            name: "tau_max",
            reason: format!("must be finite and > 0, got {tau_max}"),
        });
    }
    if !(opts.coarse_step > 0.0) || !(opts.tau_tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "coarse_step",
            reason: "scan step and tolerance must be > 0".into(),
        });
    }
    let l = build_liouvillian(p)?;
    let hb = l.battery_hamiltonian();
    let count = ((tau_max / opts.coarse_step).ceil() as usize).max(2) + 1;
    let grid = uniform_grid(0.0, tau_max, count)?;
    let (states, _) = propagate_with(&l, &DensityMatrix::ground(p.dim), &grid, &opts.propagate)?;
    let energies = states
        .iter()
        .map(|r| energy(r, hb))
        .collect::<Result<Vec<_>>>()?;
    let (imax, emax) =
        energies
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |b, (i, e)| if e > b.1 { (i, e) } else { b },
            );
    if imax == 0 || imax == count - 1 {
        return Ok(EnergyMaximum {
            tau_star: grid[imax],
            energy: emax,
            at_boundary: true,
        });
    }

    let (t0, base) = (grid[imax - 1], &states[imax - 1]);
    let exact = PropagateOptions {
        integrator: Integrator::Exact,
        ..opts.propagate
    };
    let eval = |tau: f64| -> Result<f64> {
        if tau <= t0 {
            return energy(base, hb);
        }
        let (s, _) = propagate_with(&l, base, &[tau - t0], &exact)?;
        energy(&s[0], hb)
    };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (t0, grid[imax + 1]);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (eval(c)?, eval(d)?);
    while b - a > opts.tau_tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d)?;
        }
    }
    let (tau_star, e) = if fc >= fd { (c, fc) } else { (d, fd) };
    // The coarse sample can only be beaten, never lost.
    let (tau_star, e) = if e >= emax {
        (tau_star, e)
    } else {
        (grid[imax], emax)
    };
    Ok(EnergyMaximum {
        tau_star,
        energy: e,
        at_boundary: false,
    })
}

/// `ρ(τ) = Σ_n c_n e^{λ_n τ} ρ_n` from a full dense eigendecomposition.
#[derive(Debug, Clone)]
pub struct SpectralExpansion {
    pub eigenvalues: Vec<C64>,
    pub coefficients: Vec<C64>,
    modes: ComplexMatrix,
    dim: usize,
}

impl SpectralExpansion {
    /// Expands `rho0` in the eigenbasis of `𝓛`. Dense, so intended for
    /// small truncations.
    pub fn new(l: &Liouvillian, rho0: &DensityMatrix) -> Result<Self> {
        let n = l.dim();
        if rho0.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: rho0.dim(),
            });
        }
        let eig = general_eig(l.superoperator())?;
        let coefficients = Lu::factor(&eig.eigenvectors)?.solve(rho0.matrix().as_slice());
        Ok(Self {
            eigenvalues: eig.eigenvalues,
            coefficients,
            modes: eig.eigenvectors,
            dim: n,
        })
    }

    pub fn evaluate(&self, tau: f64) -> Result<ComplexMatrix> {
        let w: Vec<C64> = self
            .coefficients
            .iter()
            .zip(&self.eigenvalues)
            .map(|(c, l)| c * (l * tau).exp())
            .collect();
        ComplexMatrix::from_col_major(self.dim, self.modes.matvec(&w))
    }
}
