use std::process::ExitCode;

use clap::Parser;
use massround_cli::{run, Cli};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("massround: {e}");
            ExitCode::from(e.code)
        }
    }
}
