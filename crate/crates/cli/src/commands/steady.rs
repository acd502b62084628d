//! Steady-state energy and ergotropy over the sweep, optionally next to the
//! charging maximum.

use qbat_core::dynamics::build_liouvillian;
use qbat_core::io::{fmt_f64, Table};
use qbat_core::steadystate::{max_energy_with, steady_state, MaxEnergyOptions, SteadyStateResult};
use qbat_core::Result;

use super::{describe, par_map, Failures};
use crate::config::{Point, RunConfig};
use crate::error::CliResult;
use crate::output::Output;

fn point(cfg: &RunConfig, pt: &Point) -> Result<(SteadyStateResult, Option<f64>)> {
    let l = build_liouvillian(&pt.params)?;
    let ss = steady_state(&l)?;
    let e_max = if cfg.compare_max {
        // Long enough for the trajectory to settle onto the steady state.
        let tau_max = cfg.tau_max.max(20.0 / ss.spectral_gap);
        let opts = MaxEnergyOptions {
            propagate: cfg.propagate_options(),
            ..MaxEnergyOptions::default()
        };
        Some(max_energy_with(&pt.params, tau_max, &opts)?.energy)
    } else {
        None
    };
    Ok((ss, e_max))
}

pub fn run(cfg: &RunConfig) -> CliResult<()> {
    let points = cfg.points();
    let results = par_map(cfg, &points, |pt| point(cfg, pt))?;

    let mut header = vec![
        "n_s",
        "gamma",
        "E_ss",
        "ergotropy_ss",
        "spectral_gap",
        "residual",
    ];
    if cfg.compare_max {
        header.push("E_max");
    }
    let mut table = Table::new(&header);
    let mut failures = Failures::default();
    for (pt, r) in points.iter().zip(results) {
        match r {
            Ok((ss, e_max)) => {
                let row = ss.row(&pt.params);
                let mut rec: Vec<String> = [
                    row.n_s,
                    row.gamma,
                    row.energy_ss,
                    row.ergotropy_ss,
                    row.spectral_gap,
                    row.residual,
                ]
                .iter()
                .map(|x| fmt_f64(*x))
                .collect();
                if let Some(e) = e_max {
                    rec.push(fmt_f64(e));
                }
                table.push(rec);
            }
            Err(e) => failures.push(describe(cfg, pt), e),
        }
    }
    let mut out = Output::new(cfg)?;
    out.table("steady", &table, None)?;
    println!("steady: {} points -> {}", points.len(), out.dir().display());
    failures.finish(&mut out, "steady", points.len())
}
