//! Charging trajectories `E(τ)`, `𝓔(τ)` per sweep point plus a summary of
//! the sampled maxima.

use qbat_core::dynamics::{build_liouvillian, charge_trajectory, TrajectoryRecord};
use qbat_core::io::{fmt_f64, Table};
use qbat_core::observables::TAIL_TOL;
use qbat_core::{Error, Result};

use super::{axis, describe, initial_state, label, par_map, Failures};
use crate::config::{Point, RunConfig};
use crate::error::CliResult;
use crate::output::{table_json, Output};

fn trajectory(cfg: &RunConfig, pt: &Point) -> Result<TrajectoryRecord> {
    let p = &pt.params;
    let l = build_liouvillian(p)?;
    let rho0 = initial_state(cfg, p.dim)?;
    let (rec, states) = charge_trajectory(&l, &rho0, &cfg.tau_grid, &cfg.propagate_options())?;
    if cfg.truncation_check {
        let tail = states
            .iter()
            .map(|s| s.population(p.dim - 1))
            .fold(0.0, f64::max);
        if tail > TAIL_TOL {
            return Err(Error::TruncationInsufficient { tail, dim: p.dim });
        }
    }
    rec.validate()?;
    Ok(rec)
}

pub fn run(cfg: &RunConfig) -> CliResult<()> {
    let points = cfg.points();
    let results = par_map(cfg, &points, |pt| trajectory(cfg, pt))?;

    let ax = axis(cfg);
    let mut summary = Table::new(&[ax.name(), "tau_argmax", "E_max", "ergotropy_max"]);
    let mut out = Output::new(cfg)?;
    let mut failures = Failures::default();
    for (pt, r) in points.iter().zip(results) {
        let rec = match r {
            Ok(rec) => rec,
            Err(e) => {
                failures.push(describe(cfg, pt), e);
                continue;
            }
        };
        let stem = match label(cfg, pt) {
            Some(l) => format!("charge_{l}"),
            None => "charge".to_string(),
        };
        let point = cfg.sweep_name().zip(pt.value);
        out.either(
            &stem,
            &rec,
            || Ok(serde_json::to_string(&table_json(&rec))?),
            point,
        )?;
        let (k, e_max) = rec.energy_max().unwrap_or((0, f64::NAN));
        let erg_max = rec
            .ergotropy
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        summary.push(vec![
            fmt_f64(ax.get(&pt.params)),
            fmt_f64(rec.times[k]),
            fmt_f64(e_max),
            fmt_f64(erg_max),
        ]);
    }
    out.table("charge_summary", &summary, None)?;
    println!("charge: {} points -> {}", points.len(), out.dir().display());
    failures.finish(&mut out, "charge", points.len())
}
