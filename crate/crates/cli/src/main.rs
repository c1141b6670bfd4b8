mod args;
mod artifact;
mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{expand_config, Cli};

const EXIT_CONFIG: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;

fn main() -> ExitCode {
    let argv = match expand_config(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_CONFIG);
        }
    };

    let (artifact, line) = match commands::dispatch(&cli) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            if let slsem::Error::DivergenceDetected { history, .. } = e.root() {
                if let Some((t, n)) = history.last() {
                    eprintln!("last sample: t={t} l2_norm={n:e} ({} samples)", history.len());
                }
            }
            return ExitCode::from(exit_code(e.root()));
        }
    };
    let path = cli.output_path();
    if let Err(e) = artifact.write(&path, cli.format) {
        eprintln!("error: writing {}: {e}", path.display());
        return ExitCode::from(EXIT_CONFIG);
    }
    println!("{line} -> {}", path.display());
    ExitCode::SUCCESS
}

/// Bad parameter combinations are config errors; everything else is numerical.
fn exit_code(e: &slsem::Error) -> u8 {
    use slsem::Error::*;
    match e {
        InvalidDegree(_)
        | AlphaOutOfRange(_)
        | KindDegreeMismatch { .. }
        | InvalidDiscretization(_)
        | BracketInvalid { .. } => EXIT_CONFIG,
        _ => EXIT_NUMERICAL,
    }
}
