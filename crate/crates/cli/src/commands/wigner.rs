//! Wigner snapshots along a charging trajectory.

use qbat_core::dynamics::{build_liouvillian, propagate_with};
use qbat_core::io::{fmt_f64, Table};
use qbat_core::observables::wigner;
use qbat_core::{DensityMatrix, Result, WignerGrid};

use super::{axis, describe, initial_state, label, par_map, Failures};
use crate::config::{Point, RunConfig};
use crate::error::CliResult;
use crate::output::Output;

fn snapshots(cfg: &RunConfig, pt: &Point) -> Result<Vec<DensityMatrix>> {
    let l = build_liouvillian(&pt.params)?;
    let rho0 = initial_state(cfg, pt.params.dim)?;
    Ok(propagate_with(&l, &rho0, &cfg.snapshots, &cfg.propagate_options())?.0)
}

pub fn run(cfg: &RunConfig) -> CliResult<()> {
    let points = cfg.points();
    let states = par_map(cfg, &points, |pt| snapshots(cfg, pt))?;

    let mut failures = Failures::default();
    let mut jobs: Vec<(usize, f64, DensityMatrix)> = Vec::new();
    for (i, (pt, r)) in points.iter().zip(states).enumerate() {
        match r {
            Ok(s) => jobs.extend(cfg.snapshots.iter().zip(s).map(|(&t, rho)| (i, t, rho))),
            Err(e) => failures.push_covering(describe(cfg, pt), e, cfg.snapshots.len()),
        }
    }
    let grids: Vec<Result<WignerGrid>> =
        par_map(cfg, &jobs, |(_, _, rho)| wigner(rho, &cfg.wigner_grid))?;

    let ax = axis(cfg);
    let mut summary = Table::new(&[ax.name(), "tau", "min_W", "max_W", "normalization"]);
    let mut out = Output::new(cfg)?;
    for ((i, t, _), r) in jobs.iter().zip(grids) {
        let pt = &points[*i];
        let w = match r {
            Ok(w) => w,
            Err(e) => {
                failures.push(format!("{} tau={t}", describe(cfg, pt)), e);
                continue;
            }
        };
        let stem = match label(cfg, pt) {
            Some(l) => format!("wigner_{l}_tau_{t}"),
            None => format!("wigner_tau_{t}"),
        };
        let point = cfg.sweep_name().zip(pt.value);
        out.either(&stem, &w, || Ok(w.to_json()?), point)?;
        summary.push(vec![
            fmt_f64(ax.get(&pt.params)),
            fmt_f64(*t),
            fmt_f64(w.min()),
            fmt_f64(w.max()),
            fmt_f64(w.normalization()),
        ]);
    }
    out.table("wigner_summary", &summary, None)?;
    println!(
        "wigner: {} snapshots -> {}",
        points.len() * cfg.snapshots.len(),
        out.dir().display()
    );
    failures.finish(&mut out, "wigner", points.len() * cfg.snapshots.len())
}
