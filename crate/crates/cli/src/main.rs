//! `graphpde` command-line front end.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::commands::Context;
use crate::error::{CliError, Result};
use crate::output::OutDir;

/// Diffusion, reaction-diffusion and steady-state solvers on weighted graphs.
#[derive(Debug, Parser)]
#[command(name = "graphpde", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Graph file (overrides `graph` in the config).
    #[arg(long, global = true, value_name = "PATH")]
    graph: Option<PathBuf>,

    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// Tolerance override: certificate tolerance for `solve`, iteration
    /// tolerance for `steady`, convergence tolerance for `classify`.
    #[arg(long, global = true, value_name = "X")]
    tol: Option<f64>,

    /// Seed for the randomized suites of `props`.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Suppress progress output.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Check the graph file axioms and domain invariants.
    Validate,
    /// Full, Dirichlet and Neumann eigensystems.
    Eig,
    /// Integrate the configured scenario and write its trajectory.
    Solve,
    /// Steady states by monotone iteration.
    Steady,
    /// Long-time classification of the configured scenarios.
    Classify,
    /// Extinction and establishment runs on the built-in five-vertex graph.
    Demo,
    /// Randomized maximum-principle, ordering and monotone-chain suites.
    Props,
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("GRAPHPDE_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::config("GRAPHPDE_THREADS", format!("expected a positive integer, got `{v}`")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::Failed(e.to_string()))
}

fn run(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(path) => config::load(path)?,
        None => config::RunConfig::default(),
    };
    let ctx = Context {
        graph: cli.graph,
        config_path: cli.config,
        config,
        out: OutDir::create(&cli.out)?,
        tol: cli.tol,
        seed: cli.seed,
        quiet: cli.quiet,
        pool: thread_pool()?,
    };
    match cli.command {
        Command::Validate => commands::validate_cmd(&ctx),
        Command::Eig => commands::eig_cmd(&ctx),
        Command::Solve => commands::solve_cmd(&ctx),
        Command::Steady => commands::steady_cmd(&ctx),
        Command::Classify => commands::classify_cmd(&ctx),
        Command::Demo => commands::demo_cmd(&ctx),
        Command::Props => commands::props_cmd(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
