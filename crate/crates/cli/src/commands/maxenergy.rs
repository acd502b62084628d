//! `max_τ E(τ)` for every (sweep point, γ) pair.

use qbat_core::io::{fmt_f64, Table};
use qbat_core::model::ModelParams;
use qbat_core::steadystate::{max_energy_with, MaxEnergyOptions};

use super::{describe, par_map, Failures};
use crate::config::{Point, RunConfig, SweepParam};
use crate::error::CliResult;
use crate::output::Output;

pub fn run(cfg: &RunConfig) -> CliResult<()> {
    // A γ sweep replaces the separate γ list.
    let gamma_swept = cfg
        .sweep
        .as_ref()
        .is_some_and(|s| s.param == SweepParam::Gamma);
    let mut jobs: Vec<(Point, ModelParams)> = Vec::new();
    for pt in cfg.points() {
        if gamma_swept {
            jobs.push((pt, pt.params));
        } else {
            for &g in &cfg.gammas {
                jobs.push((
                    pt,
                    ModelParams {
                        gamma: g,
                        ..pt.params
                    },
                ));
            }
        }
    }
    let opts = MaxEnergyOptions {
        propagate: cfg.propagate_options(),
        ..MaxEnergyOptions::default()
    };
    let results = par_map(cfg, &jobs, |(_, p)| max_energy_with(p, cfg.tau_max, &opts))?;

    let mut table = Table::new(&["n_s", "gamma", "tau_star", "E_max"]);
    let mut failures = Failures::default();
    for ((pt, p), r) in jobs.iter().zip(results) {
        match r {
            Ok(m) => table.push(vec![
                fmt_f64(p.n_s),
                fmt_f64(p.gamma),
                fmt_f64(m.tau_star),
                fmt_f64(m.energy),
            ]),
            Err(e) => failures.push(format!("{} gamma={}", describe(cfg, pt), p.gamma), e),
        }
    }
    let mut out = Output::new(cfg)?;
    out.table("maxenergy", &table, None)?;
    println!("maxenergy: {} runs -> {}", jobs.len(), out.dir().display());
    failures.finish(&mut out, "maxenergy", jobs.len())
}
