//! `ginibre`: sample Ginibre ensembles, tabulate the theory, build figure
//! data and run verification suites.

mod config;
mod error;
mod figure;
mod output;
mod sample;
mod theory;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ginibre_core::EnsembleKind;

use config::RunConfig;
use error::{usage, CliError};

pub(crate) fn parse_ensemble(s: &str) -> Result<EnsembleKind, String> {
    s.parse()
}

#[derive(Parser, Debug)]
#[command(name = "ginibre", version, about = "Eigenvector overlaps of real and complex Ginibre matrices")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "GINIBRE_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw matrices and write one record per eigenvalue.
    Sample(sample::SampleArgs),
    /// Tabulate a theoretical curve as CSV.
    Theory(theory::TheoryArgs),
    /// Produce empirical and theory tables plus a gnuplot script for a figure.
    Figure(figure::FigureArgs),
    /// Run a verification suite.
    Verify(verify::VerifyArgs),
    /// Re-run a configuration echoed by an earlier command.
    Replay {
        config: PathBuf,
    },
}

fn resolve(command: Command) -> Result<RunConfig, CliError> {
    Ok(match command {
        Command::Sample(a) => RunConfig::Sample(a.resolve()?),
        Command::Theory(a) => RunConfig::Theory(a.resolve()?),
        Command::Figure(a) => RunConfig::Figure(a.resolve()?),
        Command::Verify(a) => RunConfig::Verify(a.resolve()?),
        Command::Replay { config } => RunConfig::load(&config)?,
    })
}

fn execute(cli: Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(usage("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| usage(format!("thread pool: {e}")))?;
    }
    let config = resolve(cli.command)?;
    let outcome = config.run();
    // A failed verification still leaves a report worth replaying.
    if matches!(outcome, Ok(()) | Err(CliError::Verification(_))) {
        if let Some(path) = config.echo_path() {
            config.write_echo(&path)?;
        }
    }
    outcome
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("error")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
