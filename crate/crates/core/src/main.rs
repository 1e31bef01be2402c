use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    apotential::cli::main_with(apotential::cli::RunConfig::parse())
}
