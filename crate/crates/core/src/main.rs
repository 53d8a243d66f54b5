use std::process::ExitCode;

use clap::Parser;
use stablesv::experiment::cli::{run, Cli};

fn main() -> ExitCode {
    run(&Cli::parse())
}
