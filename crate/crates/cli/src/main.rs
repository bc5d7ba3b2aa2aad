#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod error;
mod grid;
mod reproduce;
mod table;

use clap::Parser;

use crate::args::{expand_config, Cli, Command};
use crate::error::CliError;

fn run() -> Result<(), CliError> {
    let argv = expand_config(std::env::args().collect())?;
    let cli = Cli::try_parse_from(argv).unwrap_or_else(|e| e.exit());
    match &cli.command {
        Command::Correlators(a) => commands::correlators(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Reproduce(a) => reproduce::reproduce(a),
    }
}

fn main() {
    if let Err(e) = run() {
        eprintln!("thermolens: {e}");
        std::process::exit(e.exit_code());
    }
}
