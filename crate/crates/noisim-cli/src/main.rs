//! `noisim` — calibration-driven noisy circuit simulation from the shell.
//!
//! Subcommands: device | bench | run | fit | metrics | sweep.
//! Exit codes: 0 success, 2 validation error, 3 numerical failure.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "noisim", version, about = "Noisy quantum circuit simulation and benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate, inspect, scale or flatten device snapshots.
    Device(commands::device::DeviceArgs),
    /// Emit benchmark circuits (idle-t1, hahn-echo, ghz, qaoa-jss).
    Bench(commands::bench::BenchArgs),
    /// Run a circuit through the full pipeline on a snapshot.
    Run(commands::run::RunArgs),
    /// Fit the Boltzmann model to counts (or an exact distribution).
    Fit(commands::fit::FitArgs),
    /// Distances between two counts/distribution files.
    Metrics(commands::metrics::MetricsArgs),
    /// Depth or fidelity sweeps with CSV output.
    Sweep(commands::sweep::SweepArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Device(args) => commands::device::run(args),
        Command::Bench(args) => commands::bench::run(args),
        Command::Run(args) => commands::run::run(args),
        Command::Fit(args) => commands::fit::run(args),
        Command::Metrics(args) => commands::metrics::run(args),
        Command::Sweep(args) => commands::sweep::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(output::exit_code(&err))
        }
    }
}
