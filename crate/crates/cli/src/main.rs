//! `qbat`: parameter sweeps for the driven-dissipative saturable battery.
//!
//! Exit codes: 0 success, 1 configuration or I/O error, 2 numerical
//! failure, 3 some sweep points failed.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{defaults, resolve, Format, IntegratorArg, Layer};
use error::CliResult;

#[derive(Parser)]
#[command(name = "qbat", version, about = "Saturable quantum battery simulator")]
struct Cli {
    /// Flat TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweep points (default: available processors).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Fock truncation N.
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Output format for tables.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

/// Model, time grid and sweep overrides shared by all subcommands.
#[derive(Args, Default)]
struct Common {
    #[arg(long)]
    omega: Option<f64>,
    /// Δ = ω − Ω.
    #[arg(long, allow_hyphen_values = true)]
    detuning: Option<f64>,
    /// Ω; sets Δ = ω − Ω.
    #[arg(long, conflicts_with = "detuning")]
    drive_freq: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    chi: Option<f64>,
    #[arg(long)]
    n_s: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, value_enum)]
    integrator: Option<IntegratorArg>,
    /// Integrator tolerance (absolute and relative).
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    tau_start: Option<f64>,
    #[arg(long)]
    tau_stop: Option<f64>,
    #[arg(long)]
    tau_count: Option<usize>,
    /// Explicit time grid, comma separated.
    #[arg(long, value_delimiter = ',')]
    tau: Option<Vec<f64>>,
    /// Swept parameter: omega, detuning, chi, n_s, alpha, gamma, dim or none.
    #[arg(long)]
    sweep: Option<String>,
    /// Sweep values, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        conflicts_with = "range"
    )]
    values: Option<Vec<f64>>,
    /// Sweep values as start:stop:count.
    #[arg(long, allow_hyphen_values = true)]
    range: Option<String>,
    /// Initial Fock state |k><k|.
    #[arg(long)]
    initial_fock: Option<usize>,
    /// Fail points whose top Fock level exceeds the population tolerance.
    #[arg(long)]
    truncation_check: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Level energies E_n over the sweep.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Add the second-order Kerr approximation column.
        #[arg(long)]
        kerr: bool,
    },
    /// Charging trajectories E(τ), ergotropy(τ) and their maxima.
    Charge {
        #[command(flatten)]
        common: Common,
    },
    /// Maximum charging energy for each sweep point and γ.
    Maxenergy {
        #[command(flatten)]
        common: Common,
        /// Loss rates, comma separated.
        #[arg(long, value_delimiter = ',')]
        gammas: Option<Vec<f64>>,
        #[arg(long)]
        tau_max: Option<f64>,
    },
    /// Wigner functions at snapshot times.
    Wigner {
        #[command(flatten)]
        common: Common,
        /// Snapshot times, comma separated.
        #[arg(long, value_delimiter = ',')]
        snapshots: Option<Vec<f64>>,
        /// Re β axis as min:max:count.
        #[arg(long, allow_hyphen_values = true)]
        re_range: Option<String>,
        /// Im β axis as min:max:count.
        #[arg(long, allow_hyphen_values = true)]
        im_range: Option<String>,
    },
    /// Steady-state energy and ergotropy over the sweep.
    Steady {
        #[command(flatten)]
        common: Common,
        /// Add the charging maximum E_max for comparison.
        #[arg(long)]
        compare_max: bool,
        /// Lower bound on the charging window for --compare-max.
        #[arg(long)]
        tau_max: Option<f64>,
    },
    /// Truncation, integrator and Taylor-term validation report.
    Check {
        #[command(flatten)]
        common: Common,
        /// Extra Fock levels for the truncation comparison.
        #[arg(long)]
        dim_step: Option<usize>,
    },
}

impl Common {
    fn layer(self) -> Layer {
        Layer {
            omega: self.omega,
            detuning: self.detuning,
            drive_freq: self.drive_freq,
            chi: self.chi,
            n_s: self.n_s,
            alpha: self.alpha,
            gamma: self.gamma,
            integrator: self.integrator,
            tol: self.tol,
            tau_start: self.tau_start,
            tau_stop: self.tau_stop,
            tau_count: self.tau_count,
            tau: self.tau,
            sweep: self.sweep,
            values: self.values,
            range: self.range,
            initial_fock: self.initial_fock,
            truncation_check: self.truncation_check.then_some(true),
            ..Layer::default()
        }
    }
}

fn flags(cli: &mut Cli) -> (&'static str, Layer) {
    let mut layer;
    let name = match std::mem::replace(
        &mut cli.command,
        Command::Charge {
            common: Common::default(),
        },
    ) {
        Command::Spectrum { common, kerr } => {
            layer = common.layer();
            layer.kerr = kerr.then_some(true);
            "spectrum"
        }
        Command::Charge { common } => {
            layer = common.layer();
            "charge"
        }
        Command::Maxenergy {
            common,
            gammas,
            tau_max,
        } => {
            layer = common.layer();
            layer.gammas = gammas;
            layer.tau_max = tau_max;
            "maxenergy"
        }
        Command::Wigner {
            common,
            snapshots,
            re_range,
            im_range,
        } => {
            layer = common.layer();
            layer.snapshots = snapshots;
            layer.re_range = re_range;
            layer.im_range = im_range;
            "wigner"
        }
        Command::Steady {
            common,
            compare_max,
            tau_max,
        } => {
            layer = common.layer();
            layer.compare_max = compare_max.then_some(true);
            layer.tau_max = tau_max;
            "steady"
        }
        Command::Check { common, dim_step } => {
            layer = common.layer();
            layer.dim_step = dim_step;
            "check"
        }
    };
    layer.out = cli.out.take();
    layer.jobs = cli.jobs;
    layer.dim = cli.dim;
    layer.format = cli.format;
    (name, layer)
}

fn run(mut cli: Cli) -> CliResult<()> {
    let file = match &cli.config {
        Some(path) => Layer::from_file(path)?,
        None => Layer::default(),
    };
    let (name, over) = flags(&mut cli);
    let cfg = resolve(name, defaults(name).overlay(file).overlay(over))?;
    match name {
        "spectrum" => commands::spectrum::run(&cfg),
        "charge" => commands::charge::run(&cfg),
        "maxenergy" => commands::maxenergy::run(&cfg),
        "wigner" => commands::wigner::run(&cfg),
        "steady" => commands::steady::run(&cfg),
        _ => commands::check::run(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qbat: {e}");
            e.exit_code()
        }
    }
}
