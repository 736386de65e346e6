mod args;
mod commands;
mod config;
mod error;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use config::Config;
use error::{usage, CliError};

/// Sizes the worker pool from `MCRT_THREADS` when set.
fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("MCRT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| usage(format!("MCRT_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| usage(format!("cannot size thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let cfg = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Sample(a) => commands::sample(a, &cfg),
        Command::Build(a) => commands::build(a, &cfg),
        Command::Solve(a) => commands::solve(a, &cfg),
        Command::Embed(a) => commands::embed(a, &cfg),
        Command::Walk(a) => commands::walk(a, &cfg),
        Command::Experiment(a) => commands::experiment(a, &cfg),
    }
}

fn fail(e: CliError) -> ! {
    let record = serde_json::to_string(&e.record()).unwrap_or_else(|_| "{\"error\":\"internal\"}".into());
    eprintln!("{record}");
    std::process::exit(e.exit_code());
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            e.exit();
        }
        Err(e) => {
            let _ = e.print();
            let text = e.render().to_string();
            let first = text.lines().next().unwrap_or_default().trim_start_matches("error: ");
            fail(usage(first.to_string()));
        }
    };
    if let Err(e) = run(cli) {
        fail(e);
    }
}
