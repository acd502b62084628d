//! One module per subcommand. Sweep points run on a rayon pool; results come
//! back in sweep order and are written by the calling thread.

pub mod charge;
pub mod check;
pub mod maxenergy;
pub mod spectrum;
pub mod steady;
pub mod wigner;

use qbat_core::DensityMatrix;
use rayon::prelude::*;

use crate::config::{Point, RunConfig, SweepParam};
use crate::error::{CliError, CliResult};
use crate::output::{point_label, write_errors, Output, PointError};

/// Runs `f` on every item with `cfg.jobs` workers, preserving order.
pub fn par_map<I, T, F>(cfg: &RunConfig, items: &[I], f: F) -> CliResult<Vec<T>>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    Ok(pool.install(|| items.par_iter().map(&f).collect()))
}

/// Label column name and value for a point; `n_s` when nothing is swept.
pub fn axis(cfg: &RunConfig) -> SweepParam {
    cfg.sweep.as_ref().map_or(SweepParam::NS, |s| s.param)
}

/// File stem fragment for a point, empty without a sweep.
pub fn label(cfg: &RunConfig, pt: &Point) -> Option<String> {
    let name = cfg.sweep_name()?;
    Some(point_label(name, pt.value?))
}

pub fn describe(cfg: &RunConfig, pt: &Point) -> String {
    match (cfg.sweep_name(), pt.value) {
        (Some(n), Some(v)) => format!("{n}={v}"),
        _ => "point".to_string(),
    }
}

pub fn initial_state(cfg: &RunConfig, dim: usize) -> qbat_core::Result<DensityMatrix> {
    DensityMatrix::fock(dim, cfg.initial_fock)
}

/// Per-point failures collected during a sweep.
#[derive(Default)]
pub struct Failures {
    items: Vec<(PointError, qbat_core::Error)>,
    /// Failed units of work; one error may cover several.
    count: usize,
}

impl Failures {
    pub fn push(&mut self, point: String, e: qbat_core::Error) {
        self.push_covering(point, e, 1);
    }

    /// Records one error that sinks `units` pieces of output.
    pub fn push_covering(&mut self, point: String, e: qbat_core::Error, units: usize) {
        let rec = PointError {
            point,
            error: e.to_string(),
        };
        self.items.push((rec, e));
        self.count += units;
    }

    /// Writes the error file, then maps failures onto the exit policy: all
    /// points failed is a numerical failure, some failed is partial.
    pub fn finish(mut self, out: &mut Output, command: &str, total: usize) -> CliResult<()> {
        let recs: Vec<&PointError> = self.items.iter().map(|(p, _)| p).collect();
        write_errors(out, command, &recs)?;
        if self.items.is_empty() {
            Ok(())
        } else if self.count >= total {
            Err(CliError::Numerical(self.items.swap_remove(0).1))
        } else {
            Err(CliError::Partial {
                failed: self.count,
                total,
            })
        }
    }
}
