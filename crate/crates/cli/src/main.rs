use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qnc_cli::{rate_line, CliError, RunConfig, RunMode};

#[derive(Parser)]
#[command(name = "qnc", version, about = "Quantum network coding on the butterfly network")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep every situation of a mode and write results, summary, histogram and transcript.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// state, entanglement, baseline, classical or rates
        #[arg(long)]
        mode: Option<String>,
    },
    /// Print the bar-pair table of a results file and write its histogram.
    Report {
        /// Results file; defaults to results.csv inside --out.
        results: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Print the estimated fourfold coincidence rate.
    Rates {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn load(config: Option<&PathBuf>) -> Result<RunConfig, CliError> {
    match config {
        Some(path) => RunConfig::load(path),
        None => Ok(RunConfig::default()),
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, seed, out, mode } => {
            let mut config = load(config.as_ref())?;
            if let Some(seed) = seed {
                config.seed = seed;
            }
            if let Some(out) = out {
                config.output.dir = out;
            }
            if let Some(mode) = mode {
                config.mode = mode.parse::<RunMode>()?;
            }
            let outcome = qnc_cli::run(&config)?;
            let mut text = format!("{}\n", outcome.digest);
            for file in &outcome.files {
                text += &format!("wrote {}\n", file.display());
            }
            emit(&text);
        }
        Command::Report { results, out, config } => {
            let config = load(config.as_ref())?;
            let out = out.unwrap_or_else(|| config.output.dir.clone());
            let results = results.unwrap_or_else(|| out.join(qnc_cli::RESULTS_FILE));
            let report = qnc_cli::report(&results, &out, config.output.bin_width)?;
            emit(&format!("{}wrote {}\n", report.table(), out.join(qnc_cli::HISTOGRAM_FILE).display()));
        }
        Command::Rates { config } => {
            let config = load(config.as_ref())?;
            emit(&format!("{}\n", rate_line(qnc_cli::experiment::rate_summary(&config).fourfold_rate)));
        }
    }
    Ok(())
}

// A closed pipe (e.g. `| head`) is not an error worth reporting.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qnc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
