// SPDX-License-Identifier: MIT OR Apache-2.0

//! Library side of the `kernseg` command: argument types, CSV ingestion
//! and the three subcommands, usable without spawning a process.

#![forbid(unsafe_code)]

pub mod args;
pub mod bench;
pub mod error;
pub mod input;
pub mod segment;
pub mod simulate;

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

pub use args::{Cli, Command};
pub use error::{CliError, CliResult};

fn is_stdio(path: Option<&Path>) -> bool {
    path.is_none_or(|p| p.as_os_str() == "-")
}

fn open_input(path: Option<&Path>) -> CliResult<Box<dyn Read>> {
    match path {
        Some(p) if !is_stdio(Some(p)) => {
            let file = File::open(p)
                .map_err(|e| CliError::Input(format!("cannot open {}: {e}", p.display())))?;
            Ok(Box::new(BufReader::new(file)))
        }
        _ => Ok(Box::new(io::stdin().lock())),
    }
}

fn open_output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    match path {
        Some(p) if !is_stdio(Some(p)) => Ok(Box::new(BufWriter::new(File::create(p)?))),
        _ => Ok(Box::new(io::stdout().lock())),
    }
}

fn write_json(value: &impl serde::Serialize, path: Option<&Path>) -> CliResult<()> {
    let mut out = open_output(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// Executes one parsed command line. Notices and warnings go to stderr.
pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Segment(args) => {
            let signal = input::read_signal(open_input(args.input.as_deref())?)?;
            let report = segment::run_segment(args, &signal)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            write_json(&report, args.output.as_deref())
        }
        Command::Simulate(args) => {
            let (synthetic, truth) = simulate::run_simulate(args)?;
            let mut out = open_output(args.output.as_deref())?;
            input::write_signal(&synthetic.signal, &mut out)?;
            out.flush()?;
            if let Some(path) = &args.truth {
                write_json(&truth, Some(path))?;
            }
            Ok(())
        }
        Command::Bench(args) => {
            let rows = bench::run_bench(args, |msg| eprintln!("notice: {msg}"))?;
            bench::write_rows(&rows, open_output(args.output.as_deref())?)
        }
    }
}
