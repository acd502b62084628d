//! Level table `E_n` over the sweep, optionally with the Kerr expansion.

use qbat_core::io::{fmt_f64, Table};
use qbat_core::model::spectrum_table;

use super::{axis, describe, par_map, Failures};
use crate::config::RunConfig;
use crate::error::CliResult;
use crate::output::Output;

pub fn run(cfg: &RunConfig) -> CliResult<()> {
    let points = cfg.points();
    let results = par_map(cfg, &points, |pt| spectrum_table(&pt.params, cfg.kerr))?;

    let ax = axis(cfg);
    let mut header = vec![ax.name(), "n", "E_n"];
    if cfg.kerr {
        header.push("E_n_kerr");
    }
    let mut table = Table::new(&header);
    let mut failures = Failures::default();
    for (pt, r) in points.iter().zip(results) {
        match r {
            Ok(t) => {
                for row in &t.rows {
                    let mut rec = vec![
                        fmt_f64(ax.get(&pt.params)),
                        row.n.to_string(),
                        fmt_f64(row.energy),
                    ];
                    if let Some(k) = row.energy_kerr {
                        rec.push(fmt_f64(k));
                    }
                    table.push(rec);
                }
            }
            Err(e) => failures.push(describe(cfg, pt), e),
        }
    }

    let mut out = Output::new(cfg)?;
    out.table("spectrum", &table, None)?;
    println!(
        "spectrum: {} points -> {}",
        points.len(),
        out.dir().display()
    );
    failures.finish(&mut out, "spectrum", points.len())
}
