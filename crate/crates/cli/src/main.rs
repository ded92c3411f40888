mod args;
mod commands;
mod data;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use args::{Cli, Command};
use commands::with_suffix;
use ndk_core::{Error, Result};

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Parse { .. } => 2,
        e if e.is_numeric() => 3,
        _ => 1,
    }
}

fn write_config(path: &Path, cli: &Cli) -> Result<()> {
    let config = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "workers": cli.workers,
        "run": &cli.command,
    });
    let text = serde_json::to_string_pretty(&config).map_err(|e| Error::InvalidInput(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

/// Where the resolved configuration goes for commands that write files.
fn config_path(cmd: &Command) -> Option<PathBuf> {
    match cmd {
        Command::Featurize(a) => Some(with_suffix(&a.out, ".config.json")),
        Command::Train(a) => match (&a.out, &a.out_dir) {
            (_, Some(dir)) => Some(dir.join("config.json")),
            (Some(out), None) => Some(with_suffix(out, ".config.json")),
            (None, None) => None,
        },
        Command::Gridsearch(a) => a.out.as_ref().map(|o| with_suffix(o, ".config.json")),
        _ => None,
    }
}

fn run(cli: &Cli) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let workers = cli.workers.max(1);
    match &cli.command {
        Command::Featurize(a) => commands::featurize(a, &mut out)?,
        Command::Train(a) => commands::train(a, workers, &mut out)?,
        Command::Predict(a) => commands::predict(a, &mut out)?,
        Command::Eval(a) => commands::eval(a, &mut out)?,
        Command::Bench(a) => commands::bench(a, &mut out)?,
        Command::Gridsearch(a) => {
            let result = commands::gridsearch(a, workers, &mut out)?;
            if let Some(path) = &a.out {
                let text = serde_json::to_string_pretty(&result).map_err(|e| Error::InvalidInput(e.to_string()))?;
                fs::write(path, text + "\n")?;
            }
        }
        Command::Histogram(a) => commands::histogram(a, &mut out)?,
    }
    out.flush()?;
    if let Some(path) = config_path(&cli.command) {
        write_config(&path, cli)?;
    }
    if let Some(path) = &cli.run_config {
        write_config(path, cli)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ndk: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
