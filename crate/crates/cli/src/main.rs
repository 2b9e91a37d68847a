mod args;
mod commands;
mod config_file;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::Failure;

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("DYNLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("DYNLAB_THREADS must be a count, got {raw:?}")))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Io(e.to_string()))?;
    }
    Ok(())
}

fn parse_args() -> Result<Cli, Failure> {
    let argv: Vec<OsString> = std::env::args_os().collect();
    let cli = Cli::try_parse_from(&argv).unwrap_or_else(|e| e.exit());
    let Some(path) = cli.config.clone() else {
        return Ok(cli);
    };
    let merged = config_file::merge(&argv, cli.command.name(), &path).map_err(Failure::Usage)?;
    Ok(Cli::try_parse_from(merged).unwrap_or_else(|e| e.exit()))
}

fn dispatch() -> Result<(), Failure> {
    let cli = parse_args()?;
    configure_threads()?;
    match cli.command {
        Command::Run(a) => commands::run(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Verify(a) => commands::verify(a),
        Command::Trace(a) => commands::trace(a),
    }
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("dynlab: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
