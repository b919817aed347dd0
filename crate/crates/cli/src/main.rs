//! `krigkit` command-line front end.
//!
//! Every command prints a JSON report (metadata + result) to stdout, or to
//! `--report` when given, and writes its artifacts only to the paths named by
//! its flags. Exit codes: 0 success, 2 input error, 3 computation error.

mod commands;
mod failure;
mod options;
mod report;
mod table;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use crate::failure::Failure;
use crate::options::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli, start) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: &Cli, start: Instant) -> Result<(), Failure> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.global.workers.max(1))
        .build_global()
        .map_err(|e| Failure::Compute(e.into()))?;
    let result = match &cli.command {
        Command::Fit(a) => commands::gp::fit(&cli.global, a)?,
        Command::Predict(a) => commands::gp::predict(&cli.global, a)?,
        Command::Diagnose(a) => commands::diagnose::diagnose(&cli.global, a)?,
        Command::Benchmark(a) => commands::diagnose::benchmark(&cli.global, a)?,
        Command::Lhd(a) => commands::design::lhd(&cli.global, a)?,
        Command::Simulate(a) => commands::design::simulate(&cli.global, a)?,
        Command::SvdgpFit(a) => commands::svdgp::fit(&cli.global, a)?,
        Command::SvdgpPredict(a) => commands::svdgp::predict(&cli.global, a)?,
        Command::Localgp(a) => commands::localgp::localgp(&cli.global, a)?,
        Command::Ei(a) => commands::ei::ei(&cli.global, a)?,
    };
    report::emit(cli, result, start)
}
