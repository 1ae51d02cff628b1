mod args;
mod commands;
mod manifest;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use steklov::Error;

use crate::commands::*;

#[derive(Debug, Parser)]
#[command(name = "steklov", version, about = "Steklov-Helmholtz eigenvalues by boundary integrals")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "STEKLOV_THREADS")]
    threads: Option<usize>,
    /// More log output; repeat for debug.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one eigenproblem and write the spectrum as JSON.
    Spectrum(SpectrumCmd),
    /// Mean relative error against a reference over several resolutions.
    Convergence(ConvergenceCmd),
    /// Negative-eigenvalue counts over a wavenumber grid.
    Sweep(SweepCmd),
    /// Relative deviation from Steklov-Laplace quasimodes.
    Quasimode(QuasimodeCmd),
    /// Evaluate a scale-invariant functional.
    Functional(FunctionalCmd),
    /// F_k over annuli of outer radius 1, with a sign table against the disk.
    Annulus(AnnulusCmd),
    /// Particle-swarm shape optimization.
    Optimize(OptimizeCmd),
    /// Export analytic reference spectra.
    Oracle(OracleCmd),
}

/// 2 for bad input, 3 for numerical failures.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidShape(_)
        | Error::InvalidParameter(_)
        | Error::Discretization(_)
        | Error::Io(_)
        | Error::Json(_)
        | Error::Csv(_) => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: could not configure the thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Spectrum(c) => c.run(),
        Command::Convergence(c) => c.run(),
        Command::Sweep(c) => c.run(),
        Command::Quasimode(c) => c.run(),
        Command::Functional(c) => c.run(),
        Command::Annulus(c) => c.run(),
        Command::Optimize(c) => c.run(),
        Command::Oracle(c) => c.run(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
