//! `qel`: balanced metrics and stability invariants on toric manifolds from JSON configs.

mod compare;
mod config;
mod context;
mod error;
mod manifest;
mod tasks;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::ExperimentConfig;
use crate::context::Context;
use crate::error::CliError;
use crate::manifest::{config_hash, OutputDir, RunManifest, Status, TaskRecord};

#[derive(Parser)]
#[command(name = "qel", version, about = "Balanced and relatively balanced metrics on toric manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the config's `output`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Minimise the balancing energy over the k-range in the configured mode.
    Balance(RunArgs),
    /// Bergman function of the reference metric and its expansion defect.
    Bergman(RunArgs),
    /// Both sides of the equivariant density identity.
    EquivRr(RunArgs),
    /// Donaldson-Futaki invariant from exact lattice sums.
    Df(RunArgs),
    /// DF relative to the extremal generator, with a direction scan.
    RelativeDf(RunArgs),
    /// Exact inner products between torus generators.
    Inner(RunArgs),
    /// Exact polynomial fits of dimension and weight sums.
    Fit(RunArgs),
    /// Futaki integral against DF/2pi.
    Futaki(RunArgs),
    /// Weight sequence at self-consistent critical points and its limit.
    LimitWeight(RunArgs),
    /// Chow weights over the k-range.
    Chow(RunArgs),
    /// Every task listed in the config.
    Run(RunArgs),
    /// Per-quantity differences between two runs.
    Compare {
        first: PathBuf,
        second: PathBuf,
        /// Overrides the first run's compare tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
}

fn threads() -> usize {
    std::env::var("QEL_THREADS").ok().and_then(|s| s.parse().ok()).filter(|&n| n >= 1).unwrap_or(1)
}

fn run(args: &RunArgs, command: &str, tasks: Option<Vec<String>>) -> Result<u8, CliError> {
    let cfg = ExperimentConfig::load(&args.config)?;
    let tasks = match tasks {
        Some(t) => t,
        None if cfg.tasks.is_empty() => return Err(CliError::Config("config lists no tasks".into())),
        None => cfg.tasks.clone(),
    };
    let out = args.out.clone().or_else(|| cfg.output.as_ref().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("qel-out"));
    let hash = config_hash(&cfg);
    let ctx = Context::new(cfg.clone(), hash)?;
    let mut dir = OutputDir::prepare(&out)?;
    let mut manifest = RunManifest::new(&cfg, command);
    let threads = threads();
    for task in &tasks {
        for sub in tasks::run_task(&ctx, task, threads) {
            eprintln!("{}", tasks::describe(task, &sub));
            let mut record = TaskRecord {
                task: task.clone(),
                k: sub.k,
                status: Status::Ok,
                error: None,
                exit_code: 0,
                files: Vec::new(),
                wall_time_s: sub.wall_time_s,
            };
            match sub.result {
                Ok(o) => {
                    for (path, contents) in &o.files {
                        dir.write(path, contents)?;
                        record.files.push(path.clone());
                    }
                    record.status = o.status;
                    if o.status == Status::NotConverged {
                        record.exit_code = 1;
                    }
                }
                Err(e) => {
                    record.status = Status::Error;
                    record.exit_code = e.exit_code();
                    record.error = Some(e.to_string());
                }
            }
            manifest.records.push(record);
        }
    }
    manifest.complete = manifest.records.iter().all(|r| r.status == Status::Ok);
    let manifest = dir.finish(manifest)?;
    eprintln!("manifest: {}", out.join(manifest::MANIFEST).display());
    Ok(manifest.exit_code())
}

fn compare(first: &Path, second: &Path, tol: Option<f64>) -> Result<u8, CliError> {
    let c = compare::compare(first, second, tol)?;
    println!("{}", serde_json::to_string_pretty(&c.report)?);
    Ok(if c.exceeded { 1 } else { 0 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let single = |args: &RunArgs, name: &str| run(args, name, Some(vec![name.to_string()]));
    let result = match &cli.command {
        Command::Balance(a) => single(a, "balance"),
        Command::Bergman(a) => single(a, "bergman"),
        Command::EquivRr(a) => single(a, "equiv-rr"),
        Command::Df(a) => single(a, "df"),
        Command::RelativeDf(a) => single(a, "relative-df"),
        Command::Inner(a) => single(a, "inner"),
        Command::Fit(a) => single(a, "fit"),
        Command::Futaki(a) => single(a, "futaki"),
        Command::LimitWeight(a) => single(a, "limit-weight"),
        Command::Chow(a) => single(a, "chow"),
        Command::Run(a) => run(a, "run", None),
        Command::Compare { first, second, tol } => compare(first, second, *tol),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("qel: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
