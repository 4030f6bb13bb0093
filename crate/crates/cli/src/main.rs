use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crooks_cli::report::{any_failed, write_rows, Format};
use crooks_cli::scenario::read;
use crooks_cli::{expand_sweep, run_all, Check, CliError, Result, RunOptions, Scenario};

/// Evaluate coherent Crooks checks on declarative scenarios.
///
/// Exit status: 0 when every row passes or is informational, 2 when some
/// check fails, 1 on configuration or runtime errors.
#[derive(Parser)]
#[command(name = "crooks", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more scenario files.
    Run {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Run every point of the [sweep] table of each file.
    Sweep {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Print the available checks.
    ListChecks,
}

#[derive(Args)]
struct CommonOpts {
    /// Write rows here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Multiply every comparison tolerance by this factor.
    #[arg(long, default_value_t = 1.0)]
    tol_scale: f64,
}

fn execute(scenarios: Vec<Scenario>, opts: &CommonOpts) -> Result<bool> {
    let options = RunOptions {
        seed: opts.seed,
        tol_scale: opts.tol_scale,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = opts.jobs {
        pool = pool.num_threads(jobs.max(1));
    }
    let rows = pool.build()?.install(|| run_all(&scenarios, &options))?;
    match &opts.out {
        Some(path) => {
            let file = File::create(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            write_rows(&rows, opts.format, BufWriter::new(file))?;
        }
        None => write_rows(&rows, opts.format, io::stdout().lock())?,
    }
    Ok(any_failed(&rows))
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { files, opts } => {
            let scenarios = files
                .iter()
                .map(|f| Scenario::load(f))
                .collect::<Result<Vec<_>>>()?;
            execute(scenarios, &opts)
        }
        Command::Sweep { files, opts } => {
            let mut scenarios = Vec::new();
            for f in &files {
                scenarios.extend(expand_sweep(&read(f)?, &f.display().to_string())?);
            }
            execute(scenarios, &opts)
        }
        Command::ListChecks => {
            let mut out = io::stdout().lock();
            for c in Check::ALL {
                writeln!(out, "{:<16}{}", c.name(), c.description())?;
            }
            Ok(false)
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
