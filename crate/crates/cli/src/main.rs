// SPDX-License-Identifier: MIT OR Apache-2.0

use clap::Parser;
use kernseg_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(&cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
