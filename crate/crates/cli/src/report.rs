use std::io::Write;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::failure::{Failure, InputContext};
use crate::options::Cli;

/// Version of the report layout and of every CSV this tool writes.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize)]
struct Metadata<'a> {
    tool: &'static str,
    version: &'static str,
    format_version: u32,
    seed: u64,
    config: &'a Cli,
    /// The only field that differs between identical runs.
    wall_time_s: f64,
}

#[derive(Serialize)]
struct Report<'a> {
    metadata: Metadata<'a>,
    result: Value,
}

pub fn emit(cli: &Cli, result: Value, start: Instant) -> Result<(), Failure> {
    let report = Report {
        metadata: Metadata {
            tool: "krigkit",
            version: env!("CARGO_PKG_VERSION"),
            format_version: FORMAT_VERSION,
            seed: cli.global.seed,
            config: cli,
            wall_time_s: start.elapsed().as_secs_f64(),
        },
        result,
    };
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| Failure::Compute(e.into()))?;
    text.push('\n');
    match &cli.global.report {
        Some(path) => std::fs::write(path, text).input_ctx(|| format!("cannot write {}", path.display())),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .input_ctx(|| "cannot write to stdout".into()),
    }
}
