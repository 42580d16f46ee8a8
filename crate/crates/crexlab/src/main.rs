use std::process::ExitCode;

use clap::Parser;
use crexlab::cli::{run, Cli};

fn main() -> ExitCode {
    ExitCode::from(run(Cli::parse()))
}
