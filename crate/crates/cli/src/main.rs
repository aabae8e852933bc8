//! `lorentz-ot` binary.

use std::process::ExitCode;

use clap::Parser;
use lorentz_ot_cli::{commands, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
