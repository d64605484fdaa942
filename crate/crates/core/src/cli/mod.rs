//! Command-line front end: configuration handling, orchestration and output
//! files. The `hardedge` binary is a thin wrapper around [`main_with_args`].

mod config;
mod io;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

pub use config::{
    apply_override, load_document, parse_params, resolve, KernelMethod, KernelTableConfig, RunConfig,
    SampleEquilibriumConfig, SampleKernelConfig, SimulateConfig, RESERVED_KEYS, SEED_ENV,
};
pub use io::{emit_kernel_table, emit_kernel_table_scaled, read_trajectory_csv, write_samples_csv, write_trajectory_csv};

use crate::domain::{OrderedConfig, RandomSource, SdeParams};
use crate::error::{Error, Result};
use crate::experiments::{run_named, ExperimentReport};
use crate::sde::simulate;

/// Tool name and version embedded in every report.
pub const VERSION: &str = concat!("hardedge ", env!("CARGO_PKG_VERSION"));

/// Exit code when every verdict passes.
pub const EXIT_OK: i32 = 0;
/// Exit code for usage and configuration errors.
pub const EXIT_USAGE: i32 = 1;
/// Exit code when an experiment ran but a verdict failed.
pub const EXIT_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hardedge", version, about = "Eigenvalue dynamics, corner kernels and hard-edge ensembles")]
pub struct Cli {
    /// JSON configuration document.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override a document value, `dotted.key=value`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,
    /// Master seed (falls back to the document, then HARDEDGE_SEED, then 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: logical cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Simulate one path of the eigenvalue SDE; writes trajectory.csv.
    Simulate,
    /// Draw from a corner kernel; writes samples.csv.
    SampleKernel,
    /// Draw from the inverse Laguerre ensemble; writes samples.csv.
    SampleEquilibrium,
    /// Run a named experiment; writes report.json and CSV tables.
    Experiment {
        /// One of: intertwining, uniform-approx, equilibrium, coupling-l2,
        /// collision-bound, hard-edge-density, matrix-eigen-agreement, generator.
        name: Option<String>,
    },
    /// Tabulate the inverse Bessel kernel; writes kernel_table.csv.
    KernelTable,
}

impl Command {
    fn label(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::SampleKernel => "sample-kernel",
            Command::SampleEquilibrium => "sample-equilibrium",
            Command::Experiment { .. } => "experiment",
            Command::KernelTable => "kernel-table",
        }
    }
}

/// Contents of `report.json`.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub tool: String,
    pub command: String,
    pub config: RunConfig,
    pub outputs: Vec<String>,
    pub passed: bool,
    pub report: Option<ExperimentReport>,
}

/// Result of a successful command.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub record: RunRecord,
    pub out_dir: PathBuf,
}

/// Reads the document, applies overrides and resolves shared settings.
pub fn build_config(cli: &Cli) -> Result<RunConfig> {
    let mut doc = match &cli.config {
        Some(p) => load_document(p)?,
        None => Value::Object(Default::default()),
    };
    for spec in &cli.overrides {
        apply_override(&mut doc, spec)?;
    }
    resolve(doc, cli.seed, cli.threads, cli.out.clone())
}

fn write_file(dir: &Path, name: &str, outputs: &mut Vec<String>, write: impl FnOnce(&mut dyn std::io::Write) -> Result<()>) -> Result<()> {
    let path = dir.join(name);
    let mut f = std::io::BufWriter::new(fs::File::create(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?);
    write(&mut f)?;
    std::io::Write::flush(&mut f)?;
    log::info!("wrote {}", path.display());
    outputs.push(name.to_string());
    Ok(())
}

fn draw<F>(n: usize, seed: u64, f: F) -> Result<Vec<OrderedConfig>>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Result<OrderedConfig> + Sync + Send,
{
    use rayon::prelude::*;
    let source = RandomSource::new(seed, 0);
    (0..n as u64).into_par_iter().map(|r| f(&mut source.replica(r).rng())).collect()
}

fn run_command(command: &Command, rc: &mut RunConfig) -> Result<(Vec<String>, Option<ExperimentReport>)> {
    let dir = rc.out.clone();
    fs::create_dir_all(&dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut outputs = vec![];
    let report = match command {
        Command::Simulate => {
            let cfg: SimulateConfig = parse_params(&rc.params)?;
            let x0 = OrderedConfig::new(cfg.x0.clone())?;
            let params = SdeParams::new(cfg.eta, cfg.rescaled, cfg.dt)?;
            let times = cfg.save_times()?;
            let traj = simulate(&x0, &params, cfg.t, &times, RandomSource::new(rc.seed, 0), cfg.integrator)?;
            write_file(&dir, "trajectory.csv", &mut outputs, |w| write_trajectory_csv(&traj, w))?;
            rc.params = serde_json::to_value(&cfg).map_err(|e| Error::InvalidConfig(e.to_string()))?;
            None
        }
        Command::SampleKernel => {
            let cfg: SampleKernelConfig = parse_params(&rc.params)?;
            let samples = draw(cfg.n, rc.seed, |rng| cfg.sample(rng))?;
            write_file(&dir, "samples.csv", &mut outputs, |w| write_samples_csv(&samples, "y", w))?;
            rc.params = serde_json::to_value(&cfg).map_err(|e| Error::InvalidConfig(e.to_string()))?;
            None
        }
        Command::SampleEquilibrium => {
            let cfg: SampleEquilibriumConfig = parse_params(&rc.params)?;
            let samples = draw(cfg.n, rc.seed, |rng| cfg.sample(rng))?;
            write_file(&dir, "samples.csv", &mut outputs, |w| write_samples_csv(&samples, "x", w))?;
            rc.params = serde_json::to_value(&cfg).map_err(|e| Error::InvalidConfig(e.to_string()))?;
            None
        }
        Command::KernelTable => {
            let cfg: KernelTableConfig = parse_params(&rc.params)?;
            let grid = cfg.grid()?;
            write_file(&dir, "kernel_table.csv", &mut outputs, |w| emit_kernel_table_scaled(cfg.eta, &grid, cfg.scale, w))?;
            rc.params = serde_json::to_value(&cfg).map_err(|e| Error::InvalidConfig(e.to_string()))?;
            None
        }
        Command::Experiment { name } => {
            let name = name
                .clone()
                .or_else(|| rc.experiment.clone())
                .ok_or_else(|| {
                    Error::InvalidConfig(format!(
                        "experiment name missing (positional argument or key `experiment`); one of: {}",
                        crate::experiments::EXPERIMENTS.join(", ")
                    ))
                })?;
            let report = run_named(&name, rc.params.clone(), RandomSource::new(rc.seed, 0))?;
            for (table, t) in &report.tables {
                write_file(&dir, &format!("{table}.csv"), &mut outputs, |w| Ok(w.write_all(t.to_csv().as_bytes())?))?;
            }
            rc.params = report.params.clone();
            rc.experiment = Some(name);
            Some(report)
        }
    };
    Ok((outputs, report))
}

/// Runs a parsed command line and writes `report.json` next to the other
/// outputs.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    let mut rc = build_config(cli)?;
    let threads = rc.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let (mut outputs, report) = pool.install(|| run_command(&cli.command, &mut rc))?;
    outputs.push("report.json".into());
    let record = RunRecord {
        tool: VERSION.to_string(),
        command: cli.command.label().to_string(),
        passed: report.as_ref().is_none_or(ExperimentReport::passed),
        config: rc.clone(),
        outputs,
        report,
    };
    let json = serde_json::to_string_pretty(&record).map_err(|e| Error::Io(e.to_string()))?;
    let path = rc.out.join("report.json");
    fs::write(&path, json + "\n").map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(Outcome { record, out_dir: rc.out })
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            if let Some(r) = &outcome.record.report {
                for line in r.summary_lines() {
                    println!("{line}");
                }
            }
            println!("outputs in {}", outcome.out_dir.display());
            if outcome.record.passed {
                EXIT_OK
            } else {
                EXIT_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
