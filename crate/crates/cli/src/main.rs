//! Command-line harness: benchmark, fuzz, validate and dump.

mod bench;
mod common;
mod fuzz;
mod replay;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use common::CliError;

#[derive(Parser, Debug)]
#[command(name = "lightpath", version, about = "Benchmark and check initializable arrays")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Probe counts and space of one method on a generated op sequence.
    Bench(bench::BenchArgs),
    /// Differential runs against the oracle across seeds, fills and distributions.
    Fuzz(fuzz::FuzzArgs),
    /// Replay an ops file (or a failure report), validating after every write.
    Validate(replay::ValidateArgs),
    /// Replay the writes of an ops file and print the written blocks, sorted.
    Dump(replay::DumpArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Bench(a) => bench::run(a),
        Cmd::Fuzz(a) => fuzz::run(a),
        Cmd::Validate(a) => replay::validate(a),
        Cmd::Dump(a) => replay::dump(a),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e @ CliError::Usage(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}
