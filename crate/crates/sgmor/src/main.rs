use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sgmor::commands::{run_assemble, run_reduce, run_report, run_verify};
use sgmor::{ExperimentConfig, Overrides, ReducerKind, Result};

/// Stochastic Galerkin model order reduction experiments.
///
/// Exit codes: 0 success, 2 config error, 3 numerical failure, 4 I/O error.
#[derive(Debug, Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment config (TOML). Defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Total polynomial degree of the chaos basis.
    #[arg(long, global = true)]
    degree: Option<usize>,

    #[arg(long, global = true, value_enum)]
    reducer: Option<ReducerKind>,

    /// Expansion point of the Arnoldi reducer.
    #[arg(long, global = true, allow_negative_numbers = true)]
    omega: Option<f64>,

    /// Largest reduced dimension of the sweep.
    #[arg(long, global = true)]
    rmax: Option<usize>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the Galerkin matrices and a summary.
    Assemble,
    /// Reduce over the configured range of r.
    Reduce,
    /// Simulate and check the error bound and dissipation inequality.
    Verify,
    /// Merge reduction results into a figure table.
    Report,
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.apply(&Overrides { degree: cli.degree, reducer: cli.reducer, omega: cli.omega, r_max: cli.rmax, out: cli.out });
    match cli.command {
        Command::Assemble => println!("{}", run_assemble(&cfg)?),
        Command::Reduce => {
            let (path, report) = run_reduce(&cfg)?;
            println!("{} rows -> {}", report.rows.len(), path.display());
        }
        Command::Verify => {
            let rows = run_verify(&cfg)?;
            let failed = rows.iter().filter(|r| r.holds == Some(false)).count();
            println!("{} rows, {failed} bound violations -> {}", rows.len(), cfg.out.join("verify.csv").display());
        }
        Command::Report => println!("{}", run_report(&cfg)?.display()),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
