//! Command implementations behind the `combo` binary.

pub mod args;
pub mod bench;
pub mod commands;

use anyhow::Result;

use crate::args::{Cli, Command};

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Detect(a) => commands::detect(a),
        Command::Compare(a) => commands::compare(a),
        Command::Gen(a) => commands::gen(a),
        Command::Bench(a) => {
            let (report, _) = bench::run_manifest(&a.manifest, &a.out_dir, a.jobs)?;
            println!("{}", serde_json::to_string(&report)?);
            eprintln!(
                "{} runs ok, {} failed, {} timed out",
                report.ok, report.failed, report.timeouts
            );
            Ok(if report.ok > 0 { 0 } else { 1 })
        }
    }
}
