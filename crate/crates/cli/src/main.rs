mod args;
mod commands;
mod error;
mod model;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{resolve_globals, Cli, Command, ConfigFile, Overlay};
use error::{usage, CliResult, ExitStatus};

fn run(cli: Cli) -> CliResult<ExitStatus> {
    let config = match &cli.global.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let globals = resolve_globals(&cli.global, &config);
    if let Some(threads) = globals.threads {
        if threads == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| usage(format!("cannot start worker pool: {e}")))?;
    }

    let outcome = match cli.command {
        Command::Estimate(a) => commands::estimate(&a.overlay(config.estimate.unwrap_or_default()), globals.seed)?,
        Command::Verify(a) => commands::verify(&a.overlay(config.verify.unwrap_or_default()), globals.seed)?,
        Command::Sample(a) => commands::sample(&a.overlay(config.sample.unwrap_or_default()), globals.seed)?,
        Command::Encode(a) => commands::encode(&a.overlay(config.encode.unwrap_or_default()), globals.seed)?,
    };
    outcome.report.write(globals.json, globals.seed, globals.output.as_deref())?;
    Ok(if outcome.pass { ExitStatus::Pass } else { ExitStatus::Failure })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("qdrift-lab: {e}");
            ExitCode::from(e.exit_status() as u8)
        }
    }
}
