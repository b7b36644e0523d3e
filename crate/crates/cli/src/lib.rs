//! Command-line driver: single runs, method comparisons and inertia-weight
//! sweeps, each configured by one TOML file.
//!
//! Exit codes: 0 on success, 1 on a runtime failure, 2 on a usage or
//! configuration error.

pub mod config;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use swarmbo::bench::{omega_sweep, run_experiment, BenchError, ExperimentReport, ObjectiveSpec};
use swarmbo::boloop::{run_bo, BoError, ObjectiveError};
use swarmbo::io::{self, Artifact, IoError};
use swarmbo::pso::PsoError;
use swarmbo::rng::stream;
use swarmbo::BoResult64;
use thiserror::Error;

pub use config::RunConfig;

pub const SEED_ENV: &str = "SWARMBO_SEED";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn classify_pso(e: &PsoError) -> bool {
    !matches!(e, PsoError::FitnessFailure { .. } | PsoError::DimensionMismatch)
}

fn classify_bo(e: &BoError) -> bool {
    match e {
        BoError::InvalidConfig(_) | BoError::Space(_) => true,
        BoError::Pso(p) => classify_pso(p),
        _ => false,
    }
}

impl From<BoError> for CliError {
    fn from(e: BoError) -> Self {
        if classify_bo(&e) {
            CliError::Config(e.to_string())
        } else {
            CliError::Runtime(e.to_string())
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        let config = match &e {
            BenchError::AllRunsFailed(_) => false,
            BenchError::Bo(b) => classify_bo(b),
            _ => true,
        };
        if config {
            CliError::Config(e.to_string())
        } else {
            CliError::Runtime(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "swarmbo", version, about = "Bayesian optimization with particle-swarm acquisition maximization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one optimization and write result.json and trace.csv.
    Run(CommonArgs),
    /// Compare methods over several seeds and write report.json and report.csv.
    Compare(CommonArgs),
    /// Sweep the swarm inertia weight and write sweep.csv.
    Sweep(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides `output_dir` from the config (default: current directory).
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Overrides the configured seed, and the SWARMBO_SEED variable.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub jobs: Option<usize>,
}

/// Payload of `result.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub objective: ObjectiveSpec,
    pub seed: u64,
    pub result: BoResult64,
}

/// Payload of `report.json`.
pub type ReportOutput = ExperimentReport<f64>;

/// Seed override from the command line, then the environment.
fn seed_override(args: &CommonArgs) -> Result<Option<u64>, CliError> {
    if args.seed.is_some() {
        return Ok(args.seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Config(format!("{SEED_ENV} must be a non-negative integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

/// Seeds of a comparison; an override `s` shifts the list to `s, s+1, ...`
/// keeping its length.
fn seeds_for(config: &RunConfig, args: &CommonArgs) -> Result<Vec<u64>, CliError> {
    let seeds = &config.experiment.seeds;
    Ok(match seed_override(args)? {
        Some(s) => (0..seeds.len() as u64).map(|i| s.wrapping_add(i)).collect(),
        None => seeds.clone(),
    })
}

fn output_dir(config: &RunConfig, args: &CommonArgs) -> Result<PathBuf, CliError> {
    let dir = args.output_dir.clone().or_else(|| config.output_dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

fn fmt_point(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|v| format!("{v:?}")).collect();
    format!("[{}]", parts.join(", "))
}

pub fn cmd_run(args: &CommonArgs) -> Result<(), CliError> {
    let config = RunConfig::load(&args.config)?;
    let seed = seed_override(args)?.or(config.experiment.seed).unwrap_or(0);
    let bo = config.bo_config(seed)?;
    bo.validate()?;
    let out = output_dir(&config, args)?;

    let spec = config.objective.clone();
    let mut noise = stream(seed, "noise");
    let mut objective = |x: &[f64]| {
        swarmbo::bench::eval_objective(&spec, x, &mut noise).map_err(|e| ObjectiveError(e.to_string()))
    };
    let result = run_bo(&bo, &mut objective)?;

    io::write_trace_csv(&out.join("trace.csv"), &result.incumbent_trace)?;
    println!("best value: {:?}", result.best_value);
    println!("best point: {}", fmt_point(&result.best_point));
    println!("evaluations: {}", result.evaluations);
    let payload = RunOutput { objective: config.objective.clone(), seed, result };
    io::write_json(&out.join("result.json"), &Artifact::new(payload))?;
    Ok(())
}

fn write_report(out: &Path, report: &ReportOutput) -> Result<(), CliError> {
    io::write_json(&out.join("report.json"), &Artifact::new(report))?;
    let rows = io::report_rows(report);
    io::write_report_csv(&out.join("report.csv"), &rows)?;
    for m in &report.methods {
        for s in &m.per_seed {
            io::write_trace_csv(&out.join(format!("trace_{}_{}.csv", m.method, s.seed)), &s.trace)?;
        }
    }
    Ok(())
}

pub fn cmd_compare(args: &CommonArgs) -> Result<(), CliError> {
    let config = RunConfig::load(&args.config)?;
    let methods = config.methods()?;
    let exp = config.experiment(seeds_for(&config, args)?)?;
    let out = output_dir(&config, args)?;
    let report = run_experiment(&exp, &methods)?;
    if !report.budget_parity() {
        return Err(CliError::Runtime("methods consumed different evaluation budgets".into()));
    }
    write_report(&out, &report)?;
    print!("{}", io::format_report_table(&io::report_rows(&report)));
    for m in &report.methods {
        if !m.missing.is_empty() {
            println!("{}: {} failed run(s) excluded, seeds {:?}", m.method, m.missing.len(), m.missing);
        }
    }
    Ok(())
}

pub fn cmd_sweep(args: &CommonArgs) -> Result<(), CliError> {
    let config = RunConfig::load(&args.config)?;
    let omegas = &config.experiment.omegas;
    if omegas.is_empty() {
        return Err(CliError::Config("experiment.omegas is empty".into()));
    }
    let exp = config.experiment(seeds_for(&config, args)?)?;
    let out = output_dir(&config, args)?;
    let rows = omega_sweep(&exp, &config.pso, omegas)?;
    io::write_sweep_csv(&out.join("sweep.csv"), &rows)?;
    println!("omega  ave_best");
    for r in &rows {
        println!("{:<5}  {:?}", r.omega, r.ave_best);
    }
    Ok(())
}

/// Runs a parsed command inside a worker pool of the requested size.
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let args = match &cli.command {
        Command::Run(a) | Command::Compare(a) | Command::Sweep(a) => a,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = args.jobs {
        if jobs == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        pool = pool.num_threads(jobs);
    }
    let pool = pool.build().map_err(|e| CliError::Runtime(e.to_string()))?;
    pool.install(|| match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Sweep(a) => cmd_sweep(a),
    })
}
