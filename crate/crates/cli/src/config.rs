//! Run configuration: per-command defaults, a flat TOML file, then command
//! line flags, each layer overriding the previous one.
//!
//! Every key is optional. Recognised keys (flags use the same names with
//! dashes):
//!
//! ```toml
//! omega = 1.0          # battery frequency
//! detuning = 0.1       # Δ = ω − Ω; or give drive_freq instead
//! drive_freq = 0.9
//! chi = 1.0
//! n_s = 1.0
//! alpha = 0.5
//! gamma = 0.2
//! dim = 40             # Fock truncation
//! integrator = "rk45"  # or "exact"
//! tol = 1e-9
//! tau_start = 0.0      # time grid, or an explicit list: tau = [0, 1, 2]
//! tau_stop = 100.0
//! tau_count = 2001
//! sweep = "n_s"        # swept parameter, or "none"
//! values = [0.0, 0.5]  # or range = "0:3:21" (start:stop:count)
//! initial_fock = 0
//! truncation_check = false
//! out = "qbat-out"
//! format = "csv"       # or "json"
//! jobs = 4
//! kerr = false         # spectrum
//! gammas = [0.2, 0.4]  # maxenergy
//! tau_max = 100.0      # maxenergy, steady
//! snapshots = [0, 10]  # wigner
//! re_range = "-4:4:101"
//! im_range = "-4:4:101"
//! compare_max = false  # steady
//! dim_step = 10        # check
//! ```

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use qbat_core::dynamics::{uniform_grid, Integrator, PropagateOptions, DEFAULT_TOL};
use qbat_core::model::ModelParams;
use qbat_core::observables::{GridAxis, PhaseSpaceGrid};
use serde::{Deserialize, Serialize};

use crate::error::{config_err, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntegratorArg {
    Rk45,
    Exact,
}

impl From<IntegratorArg> for Integrator {
    fn from(a: IntegratorArg) -> Self {
        match a {
            IntegratorArg::Rk45 => Integrator::Rk45,
            IntegratorArg::Exact => Integrator::Exact,
        }
    }
}

/// One configuration layer; `None` means "not set here".
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layer {
    pub omega: Option<f64>,
    pub detuning: Option<f64>,
    pub drive_freq: Option<f64>,
    pub chi: Option<f64>,
    pub n_s: Option<f64>,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub dim: Option<usize>,
    pub integrator: Option<IntegratorArg>,
    pub tol: Option<f64>,
    pub tau_start: Option<f64>,
    pub tau_stop: Option<f64>,
    pub tau_count: Option<usize>,
    pub tau: Option<Vec<f64>>,
    pub sweep: Option<String>,
    pub values: Option<Vec<f64>>,
    pub range: Option<String>,
    pub initial_fock: Option<usize>,
    pub truncation_check: Option<bool>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub jobs: Option<usize>,
    pub kerr: Option<bool>,
    pub gammas: Option<Vec<f64>>,
    pub tau_max: Option<f64>,
    pub snapshots: Option<Vec<f64>>,
    pub re_range: Option<String>,
    pub im_range: Option<String>,
    pub compare_max: Option<bool>,
    pub dim_step: Option<usize>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($f:ident),* $(,)?) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f; } )*
    };
}

impl Layer {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))
    }

    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    /// Fields set in `top` replace those in `self`. A sweep set by `top`
    /// also replaces the whole axis, so `values` and `range` never mix
    /// across layers.
    pub fn overlay(mut self, top: Layer) -> Self {
        if top.values.is_some() || top.range.is_some() {
            self.values = None;
            self.range = None;
        }
        if top.tau.is_some()
            || top.tau_start.is_some()
            || top.tau_stop.is_some()
            || top.tau_count.is_some()
        {
            self.tau = None;
        }
        if top.tau.is_some() {
            self.tau_start = None;
            self.tau_stop = None;
            self.tau_count = None;
        }
        if top.detuning.is_some() {
            self.drive_freq = None;
        }
        if top.drive_freq.is_some() {
            self.detuning = None;
        }
        overlay!(
            self,
            top,
            omega,
            detuning,
            drive_freq,
            chi,
            n_s,
            alpha,
            gamma,
            dim,
            integrator,
            tol,
            tau_start,
            tau_stop,
            tau_count,
            tau,
            sweep,
            values,
            range,
            initial_fock,
            truncation_check,
            out,
            format,
            jobs,
            kerr,
            gammas,
            tau_max,
            snapshots,
            re_range,
            im_range,
            compare_max,
            dim_step,
        );
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Omega,
    Detuning,
    Chi,
    #[serde(rename = "n_s")]
    NS,
    Alpha,
    Gamma,
    Dim,
}

impl SweepParam {
    fn parse(s: &str) -> CliResult<Self> {
        Ok(match s {
            "omega" => Self::Omega,
            "detuning" => Self::Detuning,
            "chi" => Self::Chi,
            "n_s" => Self::NS,
            "alpha" => Self::Alpha,
            "gamma" => Self::Gamma,
            "dim" => Self::Dim,
            other => {
                return Err(config_err(format!(
                    "sweep parameter `{other}` is not one of omega, detuning, chi, n_s, alpha, gamma, dim"
                )))
            }
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Omega => "omega",
            Self::Detuning => "detuning",
            Self::Chi => "chi",
            Self::NS => "n_s",
            Self::Alpha => "alpha",
            Self::Gamma => "gamma",
            Self::Dim => "dim",
        }
    }

    pub fn get(self, p: &ModelParams) -> f64 {
        match self {
            Self::Omega => p.omega,
            Self::Detuning => p.detuning,
            Self::Chi => p.chi,
            Self::NS => p.n_s,
            Self::Alpha => p.alpha,
            Self::Gamma => p.gamma,
            Self::Dim => p.dim as f64,
        }
    }

    /// Sets the parameter; sweeping `omega` keeps `Δ`.
    pub fn apply(self, p: &mut ModelParams, v: f64) {
        match self {
            Self::Omega => p.omega = v,
            Self::Detuning => p.detuning = v,
            Self::Chi => p.chi = v,
            Self::NS => p.n_s = v,
            Self::Alpha => p.alpha = v,
            Self::Gamma => p.gamma = v,
            Self::Dim => p.dim = v as usize,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Sweep {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub params: ModelParams,
    pub sweep: Option<Sweep>,
    pub tau_grid: Vec<f64>,
    pub integrator: Integrator,
    pub tol: f64,
    pub initial_fock: usize,
    pub truncation_check: bool,
    pub out: PathBuf,
    pub format: Format,
    #[serde(skip)]
    pub jobs: usize,
    pub kerr: bool,
    pub gammas: Vec<f64>,
    pub tau_max: f64,
    pub snapshots: Vec<f64>,
    pub wigner_grid: PhaseSpaceGrid,
    pub compare_max: bool,
    pub dim_step: usize,
}

/// One resolved parameter point of a sweep.
#[derive(Debug, Clone, Copy)]
pub struct Point {
    pub params: ModelParams,
    /// Swept value, if any.
    pub value: Option<f64>,
}

impl RunConfig {
    pub fn propagate_options(&self) -> PropagateOptions {
        PropagateOptions {
            integrator: self.integrator,
            tol: self.tol,
            ..PropagateOptions::default()
        }
    }

    pub fn points(&self) -> Vec<Point> {
        match &self.sweep {
            None => vec![Point {
                params: self.params,
                value: None,
            }],
            Some(s) => s
                .values
                .iter()
                .map(|&v| {
                    let mut p = self.params;
                    s.param.apply(&mut p, v);
                    Point {
                        params: p,
                        value: Some(v),
                    }
                })
                .collect(),
        }
    }

    pub fn sweep_name(&self) -> Option<&'static str> {
        self.sweep.as_ref().map(|s| s.param.name())
    }
}

pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![start],
        _ => {
            let h = (stop - start) / (count - 1) as f64;
            let mut v: Vec<f64> = (0..count).map(|k| start + k as f64 * h).collect();
            v[count - 1] = stop;
            v
        }
    }
}

/// `start:stop:count`.
pub fn parse_range(key: &str, s: &str) -> CliResult<(f64, f64, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || {
        config_err(format!(
            "`{key}` must look like start:stop:count, got `{s}`"
        ))
    };
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    Ok((a, b, n))
}

/// Built-in defaults for each command.
pub fn defaults(command: &str) -> Layer {
    let charge_sweep = vec![0.0, 0.3, 0.6, 1.0, 1.5, 3.0];
    let base = Layer {
        tau_start: Some(0.0),
        tau_stop: Some(100.0),
        tau_count: Some(2001),
        integrator: Some(IntegratorArg::Rk45),
        tol: Some(DEFAULT_TOL),
        initial_fock: Some(0),
        truncation_check: Some(false),
        out: Some(PathBuf::from("qbat-out")),
        format: Some(Format::Csv),
        kerr: Some(false),
        gammas: Some(vec![0.2, 0.4]),
        tau_max: Some(100.0),
        snapshots: Some(vec![0.0, 4.0, 8.0, 12.0, 16.0, 20.0]),
        re_range: Some("-4:4:101".into()),
        im_range: Some("-4:4:101".into()),
        compare_max: Some(false),
        dim_step: Some(10),
        ..Layer::default()
    };
    let specific = match command {
        "spectrum" => Layer {
            omega: Some(1.0),
            chi: Some(1.0),
            dim: Some(31),
            sweep: Some("n_s".into()),
            range: Some("0:2:21".into()),
            ..Layer::default()
        },
        "charge" | "check" => Layer {
            sweep: Some("n_s".into()),
            values: Some(charge_sweep),
            ..Layer::default()
        },
        "maxenergy" | "steady" => Layer {
            sweep: Some("n_s".into()),
            range: Some("0:3:21".into()),
            ..Layer::default()
        },
        "wigner" => Layer {
            n_s: Some(1.0),
            alpha: Some(0.3),
            gamma: Some(0.01),
            dim: Some(60),
            ..Layer::default()
        },
        _ => Layer::default(),
    };
    base.overlay(specific)
}

fn axis(key: &str, s: &str) -> CliResult<GridAxis> {
    let (a, b, n) = parse_range(key, s)?;
    if n == 0 || !(b > a || (n == 1 && a == b)) {
        return Err(config_err(format!(
            "`{key}` needs min < max and count >= 1"
        )));
    }
    Ok(GridAxis::new(a, b, n))
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite()) && v.windows(2).all(|w| w[1] > w[0])
}

/// Fills in a `RunConfig` from a fully layered configuration.
pub fn resolve(command: &'static str, l: Layer) -> CliResult<RunConfig> {
    let mut p = ModelParams::default();
    macro_rules! set {
        ($($f:ident),*) => { $( if let Some(v) = l.$f { p.$f = v; } )* };
    }
    set!(omega, chi, n_s, alpha, gamma, dim);
    match (l.detuning, l.drive_freq) {
        (Some(d), None) => p.detuning = d,
        (None, Some(w)) => p.set_drive_freq(w),
        (None, None) => {}
        (Some(_), Some(_)) => {
            return Err(config_err(
                "give either `detuning` or `drive_freq`, not both",
            ))
        }
    }
    p.validate().map_err(|e| config_err(e.to_string()))?;

    let sweep = match (&l.sweep, &l.values, &l.range) {
        (_, Some(_), Some(_)) => {
            return Err(config_err("give either `values` or `range`, not both"))
        }
        (None, None, None) => None,
        (Some(name), _, _) if name == "none" => None,
        (None, _, _) => return Err(config_err("`values`/`range` need a `sweep` parameter")),
        (Some(name), values, range) => {
            let param = SweepParam::parse(name)?;
            let values = match (values, range) {
                (Some(v), _) => v.clone(),
                (None, Some(r)) => {
                    let (a, b, n) = parse_range("range", r)?;
                    linspace(a, b, n)
                }
                (None, None) => {
                    return Err(config_err(format!("sweep over `{name}` has no values")))
                }
            };
            if values.is_empty() {
                return Err(config_err(format!("sweep over `{name}` is empty")));
            }
            for &v in &values {
                let mut q = p;
                param.apply(&mut q, v);
                if param == SweepParam::Dim && (v.fract() != 0.0 || v < 0.0) {
                    return Err(config_err(format!("dim sweep value {v} is not an integer")));
                }
                q.validate()
                    .map_err(|e| config_err(format!("sweep value {name} = {v}: {e}")))?;
            }
            Some(Sweep { param, values })
        }
    };

    let tau_grid = match &l.tau {
        Some(t) => t.clone(),
        None => {
            let (a, b, n) = (
                l.tau_start.unwrap_or(0.0),
                l.tau_stop.unwrap_or(100.0),
                l.tau_count.unwrap_or(2001),
            );
            uniform_grid(a, b, n).map_err(|_| {
                config_err(format!("time grid {a}..{b} with {n} points is not valid"))
            })?
        }
    };
    if tau_grid.is_empty() || tau_grid[0] < 0.0 || !strictly_increasing(&tau_grid) {
        return Err(config_err(
            "time grid must be non-empty, start at >= 0 and strictly increase",
        ));
    }

    let tol = l.tol.unwrap_or(DEFAULT_TOL);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(config_err("`tol` must be positive"));
    }
    let jobs = match l.jobs {
        Some(0) => return Err(config_err("`jobs` must be at least 1")),
        Some(j) => j,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let tau_max = l.tau_max.unwrap_or(100.0);
    if !(tau_max > 0.0 && tau_max.is_finite()) {
        return Err(config_err("`tau_max` must be positive"));
    }
    let gammas = l.gammas.unwrap_or_default();
    if command == "maxenergy" && (gammas.is_empty() || gammas.iter().any(|g| !(*g >= 0.0))) {
        return Err(config_err(
            "`gammas` must be a non-empty list of values >= 0",
        ));
    }
    let snapshots = l.snapshots.unwrap_or_default();
    if command == "wigner"
        && (snapshots.is_empty() || snapshots[0] < 0.0 || !strictly_increasing(&snapshots))
    {
        return Err(config_err(
            "`snapshots` must be non-empty, >= 0 and strictly increasing",
        ));
    }
    let wigner_grid = PhaseSpaceGrid {
        re: axis("re_range", l.re_range.as_deref().unwrap_or("-4:4:101"))?,
        im: axis("im_range", l.im_range.as_deref().unwrap_or("-4:4:101"))?,
    };
    let initial_fock = l.initial_fock.unwrap_or(0);
    let max_dim = sweep
        .as_ref()
        .filter(|s| s.param == SweepParam::Dim)
        .map_or(p.dim, |s| {
            s.values.iter().fold(f64::INFINITY, |a, b| a.min(*b)) as usize
        });
    if initial_fock >= max_dim {
        return Err(config_err(format!(
            "initial_fock = {initial_fock} does not fit in dim = {max_dim}"
        )));
    }
    let dim_step = l.dim_step.unwrap_or(10);
    if dim_step == 0 {
        return Err(config_err("`dim_step` must be at least 1"));
    }

    Ok(RunConfig {
        command,
        params: p,
        sweep,
        tau_grid,
        integrator: l.integrator.map_or(Integrator::Rk45, Into::into),
        tol,
        initial_fock,
        truncation_check: l.truncation_check.unwrap_or(false),
        out: l.out.unwrap_or_else(|| PathBuf::from("qbat-out")),
        format: l.format.unwrap_or_default(),
        jobs,
        kerr: l.kerr.unwrap_or(false),
        gammas,
        tau_max,
        snapshots,
        wigner_grid,
        compare_max: l.compare_max.unwrap_or(false),
        dim_step,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_override_defaults() {
        let file = Layer::from_toml("gamma = 0.4\nalpha = 0.7\nvalues = [1.0]\n").unwrap();
        let flags = Layer {
            gamma: Some(0.3),
            ..Layer::default()
        };
        let cfg = resolve("charge", defaults("charge").overlay(file).overlay(flags)).unwrap();
        assert_eq!(cfg.params.gamma, 0.3);
        assert_eq!(cfg.params.alpha, 0.7);
        assert_eq!(cfg.sweep.unwrap().values, vec![1.0]);
        assert_eq!(cfg.tau_grid.len(), 2001);
    }

    #[test]
    fn drive_frequency_sets_detuning() {
        let file = Layer::from_toml("omega = 2.0\ndrive_freq = 1.5\n").unwrap();
        let cfg = resolve("charge", defaults("charge").overlay(file)).unwrap();
        assert_eq!(cfg.params.detuning, 0.5);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Layer::from_toml("colour = 1").is_err());
        let bad = [
            "sweep = \"beta\"",
            "values = []",
            "tau = [0.0, 2.0, 1.0]",
            "gamma = -1.0",
            "detuning = 0.1\ndrive_freq = 0.2",
        ];
        for text in bad {
            let file = Layer::from_toml(text).unwrap();
            assert!(
                resolve("charge", defaults("charge").overlay(file)).is_err(),
                "{text}"
            );
        }
    }

    #[test]
    fn range_expands() {
        let cfg = resolve("steady", defaults("steady")).unwrap();
        let s = cfg.sweep.unwrap();
        assert_eq!(s.values.len(), 21);
        assert_eq!(s.values[20], 3.0);
    }
}
