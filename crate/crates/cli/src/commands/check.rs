//! Validation report: truncation convergence, integrator agreement and the
//! short-time Taylor terms, per sweep point. Failures are report content,
//! not errors.

use qbat_core::dynamics::{
    build_liouvillian, charge_trajectory, convergence_order, propagate_with, taylor_term,
    vacuum_terms, Integrator, PropagateOptions,
};
use qbat_core::linalg::{trace_distance, LinearOperator};
use qbat_core::model::ModelParams;
use qbat_core::{Liouvillian, Result};
use serde::Serialize;

use super::{describe, initial_state, par_map};
use crate::config::{Point, RunConfig};
use crate::error::CliResult;
use crate::output::Output;

pub const ENERGY_TOL: f64 = 1e-6;
pub const TRACE_DISTANCE_TOL: f64 = 1e-8;
pub const TAYLOR_TOL: f64 = 1e-12;
pub const ORDER1_RANGE: (f64, f64) = (1.8, 2.2);
pub const ORDER2_RANGE: (f64, f64) = (2.8, 3.2);
const SAMPLED_TIMES: usize = 10;
const HALVINGS: usize = 4;

#[derive(Debug, Serialize)]
pub struct TruncationCheck {
    pub dim: usize,
    pub compare_dim: usize,
    pub max_energy_diff: f64,
    pub tol: f64,
    /// Largest population of the top Fock level along the trajectory.
    pub top_population: f64,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct IntegratorCheck {
    pub times: Vec<f64>,
    pub max_trace_distance: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct TaylorCheck {
    /// Elementwise error of the first and second terms against their closed
    /// forms; absent unless the initial state is the vacuum.
    pub first_term_error: Option<f64>,
    pub second_term_error: Option<f64>,
    pub tol: f64,
    pub order1_exponent: f64,
    pub order2_exponent: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct Section<T> {
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    pub result: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl<T> Section<T> {
    fn from(r: Result<T>) -> Self {
        match r {
            Ok(v) => Self {
                result: Some(v),
                error: None,
            },
            Err(e) => Self {
                result: None,
                error: Some(e.to_string()),
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PointReport {
    pub point: String,
    pub params: ModelParams,
    pub truncation: Section<TruncationCheck>,
    pub integrators: Section<IntegratorCheck>,
    pub taylor: Section<TaylorCheck>,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub pass: bool,
    pub points: Vec<PointReport>,
}

fn truncation(cfg: &RunConfig, p: &ModelParams) -> Result<TruncationCheck> {
    let opts = cfg.propagate_options();
    let run = |dim: usize| {
        let q = ModelParams { dim, ..*p };
        let l = build_liouvillian(&q)?;
        charge_trajectory(&l, &initial_state(cfg, dim)?, &cfg.tau_grid, &opts)
    };
    let (small, states) = run(p.dim)?;
    let compare_dim = p.dim + cfg.dim_step;
    let (big, _) = run(compare_dim)?;
    let max_energy_diff = small
        .energy
        .iter()
        .zip(&big.energy)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let top_population = states
        .iter()
        .map(|s| s.population(p.dim - 1))
        .fold(0.0, f64::max);
    Ok(TruncationCheck {
        dim: p.dim,
        compare_dim,
        max_energy_diff,
        tol: ENERGY_TOL,
        top_population,
        pass: max_energy_diff <= ENERGY_TOL,
    })
}

/// Up to ten grid times spread evenly over the grid, excluding `τ = 0`.
fn sample_times(grid: &[f64]) -> Vec<f64> {
    let nonzero: Vec<f64> = grid.iter().copied().filter(|t| *t > 0.0).collect();
    let n = nonzero.len();
    if n <= SAMPLED_TIMES {
        return nonzero;
    }
    (1..=SAMPLED_TIMES)
        .map(|k| nonzero[k * n / SAMPLED_TIMES - 1])
        .collect()
}

fn integrators(cfg: &RunConfig, l: &Liouvillian) -> Result<IntegratorCheck> {
    let times = sample_times(&cfg.tau_grid);
    let rho0 = initial_state(cfg, l.dim())?;
    let run = |integrator| {
        let opts = PropagateOptions {
            integrator,
            ..cfg.propagate_options()
        };
        propagate_with(l, &rho0, &times, &opts).map(|r| r.0)
    };
    let rk = run(Integrator::Rk45)?;
    let exact = run(Integrator::Exact)?;
    let mut max_trace_distance = 0.0f64;
    for (a, b) in rk.iter().zip(&exact) {
        max_trace_distance = max_trace_distance.max(trace_distance(a.matrix(), b.matrix())?);
    }
    Ok(IntegratorCheck {
        times,
        max_trace_distance,
        tol: TRACE_DISTANCE_TOL,
        pass: max_trace_distance <= TRACE_DISTANCE_TOL,
    })
}

fn taylor(cfg: &RunConfig, p: &ModelParams, l: &Liouvillian) -> Result<TaylorCheck> {
    let rho0 = initial_state(cfg, p.dim)?;
    let (mut first, mut second, mut note) = (None, None, None);
    if cfg.initial_fock == 0 {
        match vacuum_terms(p) {
            Ok((t1, t2)) => {
                first = Some(taylor_term(l, &rho0, 1)?.max_abs_diff(&t1));
                second = Some(taylor_term(l, &rho0, 2)?.max_abs_diff(&t2));
            }
            Err(e) => note = Some(format!("closed forms unavailable: {e}")),
        }
    } else {
        note = Some("closed forms hold only for the vacuum initial state".into());
    }
    // Keep τ‖𝓛‖ below one so the truncated series is meaningful.
    let tau0 = 0.5 / LinearOperator::norm1(l).max(1e-12);
    let order1_exponent = convergence_order(l, &rho0, 1, tau0, HALVINGS)?;
    let order2_exponent = convergence_order(l, &rho0, 2, tau0, HALVINGS)?;
    let within = |x: f64, (lo, hi): (f64, f64)| (lo..=hi).contains(&x);
    let terms_ok = match (first, second) {
        (Some(a), Some(b)) => a <= TAYLOR_TOL && b <= TAYLOR_TOL,
        _ => cfg.initial_fock != 0,
    };
    Ok(TaylorCheck {
        first_term_error: first,
        second_term_error: second,
        tol: TAYLOR_TOL,
        order1_exponent,
        order2_exponent,
        pass: terms_ok
            && within(order1_exponent, ORDER1_RANGE)
            && within(order2_exponent, ORDER2_RANGE),
        note,
    })
}

fn check_point(cfg: &RunConfig, pt: &Point) -> PointReport {
    let p = pt.params;
    let l = build_liouvillian(&p);
    let (integrators, taylor) = match &l {
        Ok(l) => (
            Section::from(integrators(cfg, l)),
            Section::from(taylor(cfg, &p, l)),
        ),
        Err(e) => (
            Section {
                result: None,
                error: Some(e.to_string()),
            },
            Section {
                result: None,
                error: Some(e.to_string()),
            },
        ),
    };
    let truncation = Section::from(truncation(cfg, &p));
    let pass = truncation.result.as_ref().is_some_and(|r| r.pass)
        && integrators.result.as_ref().is_some_and(|r| r.pass)
        && taylor.result.as_ref().is_some_and(|r| r.pass);
    PointReport {
        point: describe(cfg, pt),
        params: p,
        truncation,
        integrators,
        taylor,
        pass,
    }
}

fn verdict(pass: Option<bool>) -> &'static str {
    match pass {
        Some(true) => "pass",
        Some(false) => "FAIL",
        None => "error",
    }
}

pub fn run(cfg: &RunConfig) -> CliResult<()> {
    let points = cfg.points();
    let reports = par_map(cfg, &points, |pt| check_point(cfg, pt))?;
    let report = CheckReport {
        pass: reports.iter().all(|r| r.pass),
        points: reports,
    };
    for r in &report.points {
        let t = r.truncation.result.as_ref();
        let i = r.integrators.result.as_ref();
        let y = r.taylor.result.as_ref();
        println!(
            "{}: truncation {} ({:.2e}), integrators {} ({:.2e}), taylor {} (orders {:.2}, {:.2})",
            r.point,
            verdict(t.map(|x| x.pass)),
            t.map_or(f64::NAN, |x| x.max_energy_diff),
            verdict(i.map(|x| x.pass)),
            i.map_or(f64::NAN, |x| x.max_trace_distance),
            verdict(y.map(|x| x.pass)),
            y.map_or(f64::NAN, |x| x.order1_exponent),
            y.map_or(f64::NAN, |x| x.order2_exponent),
        );
    }
    println!("check: {}", if report.pass { "pass" } else { "FAIL" });
    let mut out = Output::new(cfg)?;
    out.json("check", &serde_json::to_string_pretty(&report)?, None)?;
    Ok(())
}
