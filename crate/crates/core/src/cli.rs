//! Command-line front end.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_config, ConfigError, Overrides};
use crate::experiment::{expand_grid, run_grid, RunnerOptions};
use crate::landscape::{InteractionStructure, Landscape};
use crate::output::{fmt_sig, write_outputs};

pub const EXIT_OK: u8 = 0;
/// Invalid arguments or configuration.
pub const EXIT_CONFIG: u8 = 2;
/// Simulation or I/O failure.
pub const EXIT_RUNTIME: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "normsim", version, about = "Incentives and emergent social norms on correlated NK landscapes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario grid and write summary, contour and series CSVs.
    Run(RunArgs),
    /// Sample one landscape, print its global maximum and optionally dump it.
    Landscape(LandscapeArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// TOML grid configuration; defaults apply when omitted.
    pub config: Option<PathBuf>,
    /// Repetitions per scenario (R).
    #[arg(long)]
    pub runs: Option<usize>,
    /// Observation period (T).
    #[arg(long)]
    pub periods: Option<u32>,
    /// Global seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads.
    #[arg(long, env = "NORMSIM_WORKERS")]
    pub workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Also write per-period mean and per-run series.
    #[arg(long)]
    pub emit_series: bool,
    /// Share landscapes and draws across scenarios of one complexity level.
    #[arg(long, value_name = "BOOL")]
    pub paired_landscapes: Option<bool>,
    /// Suppress progress messages.
    #[arg(long, short)]
    pub quiet: bool,
}

#[derive(Debug, Args)]
pub struct LandscapeArgs {
    /// Read a dump instead of sampling.
    #[arg(long, conflicts_with = "out")]
    pub load: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub p: usize,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub c: usize,
    #[arg(long, default_value_t = 0)]
    pub s: usize,
    #[arg(long, default_value_t = 0.3)]
    pub rho: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Write the binary dump here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(args) => run(args),
        Command::Landscape(args) => landscape(args),
    }
}

fn run(args: RunArgs) -> Result<(), CliError> {
    let document = match &args.config {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?,
        None => String::new(),
    };
    let (mut grid, mut run_cfg) = parse_config(&document)?;
    Overrides {
        runs: args.runs,
        periods: args.periods,
        seed: args.seed,
        workers: args.workers,
        out_dir: args.out_dir.clone(),
        emit_series: args.emit_series,
        paired_landscapes: args.paired_landscapes,
    }
    .apply(&mut grid, &mut run_cfg)?;

    let scenarios = expand_grid(&grid).map_err(|e| CliError::Config(e.to_string()))?;
    if !args.quiet {
        eprintln!(
            "[normsim] {} scenarios x {} runs, T={}, {} workers",
            scenarios.len(),
            run_cfg.runs,
            grid.model.periods,
            run_cfg.workers
        );
    }
    let started = Instant::now();
    let reports = run_grid(
        &scenarios,
        &RunnerOptions {
            runs: run_cfg.runs,
            workers: run_cfg.workers,
            keep_runs: run_cfg.emit_series,
        },
    )
    .map_err(|e| CliError::Runtime(e.to_string()))?;
    let written = write_outputs(&reports, &run_cfg.out_dir, run_cfg.emit_series)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    if !args.quiet {
        eprintln!(
            "[normsim] done in {:.1}s, wrote {} files to {}",
            started.elapsed().as_secs_f64(),
            written.len(),
            run_cfg.out_dir.display()
        );
    }
    Ok(())
}

fn landscape(args: LandscapeArgs) -> Result<(), CliError> {
    let lsc = match &args.load {
        Some(path) => {
            let file = File::open(path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
            Landscape::read_from(std::io::BufReader::new(file))
                .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?
        }
        None => {
            let structure = InteractionStructure::new(args.n, args.p, args.k, args.c, args.s)
                .map_err(|e| CliError::Config(e.to_string()))?;
            Landscape::sample(structure, args.rho, args.seed).map_err(|e| CliError::Config(e.to_string()))?
        }
    };
    let s = lsc.structure();
    let (k, c, sc) = s.couplings();
    println!(
        "N={} P={} K={k} C={c} S={sc} rho={} seed={}",
        s.tasks_per_agent(),
        s.agents(),
        fmt_sig(lsc.rho()),
        lsc.seed()
    );
    println!(
        "global_max={} argmax={:0width$b} digest={:016x}",
        fmt_sig(lsc.global_max()),
        lsc.argmax_state().bits(),
        lsc.digest(),
        width = s.tasks()
    );
    if let Some(path) = &args.out {
        let file = File::create(path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
        lsc.write_to(BufWriter::new(file))
            .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}
