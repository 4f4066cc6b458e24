mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::config::{Args, RunConfig};

fn main() -> ExitCode {
    let args = Args::parse();
    let result = RunConfig::resolve(&args).and_then(|cfg| commands::run(&cfg));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("multibag: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
