//! Batch driver for butterfly quantum network coding experiments.
//!
//! `run` sweeps every situation of a mode and writes `results.csv`,
//! `summary.json`, `histogram.csv` and `transcript.jsonl` into one directory;
//! `report` turns a results file back into bar-pair tables and histogram data.

pub mod config;
pub mod experiment;
pub mod report;

use std::fs;
use std::path::{Path, PathBuf};

use qnc_core::analysis::{histogram, CsvRow, ResultMode, SituationResult, Summary};
use qnc_core::network::{to_jsonl, NetworkEvent};
use qnc_core::noise::NoiseModel;
use serde::Serialize;

pub use config::{RunConfig, RunMode};
use experiment::Sweep;

pub const RESULTS_FILE: &str = "results.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const HISTOGRAM_FILE: &str = "histogram.csv";
pub const TRANSCRIPT_FILE: &str = "transcript.jsonl";

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("corrupt results: {0}")]
    Corrupt(String),
    #[error("runtime error: {0}")]
    Runtime(String),
    #[error("transcript audit found {0} violation(s)")]
    Audit(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            _ => 2,
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    text.push('\n');
    write_text(path, &text)
}

fn write_results(path: &Path, results: &[SituationResult]) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    for r in results {
        writer.serialize(CsvRow::from(r)).map_err(|e| io_err(path, e))?;
    }
    writer.flush().map_err(|e| io_err(path, e))
}

#[derive(Debug, Clone, Serialize)]
struct SweepSummary<'a> {
    #[serde(flatten)]
    summary: Summary,
    seed: u64,
    counts_per_situation: u64,
    noise: &'a NoiseModel,
    transcript_events: usize,
    audit_violations: usize,
}

/// Where a run left its files, plus a one-line digest for the terminal.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub digest: String,
}

/// Aggregate over both streams: each stream's weights sum to 1, so every
/// row counts with half its situation weight.
pub fn summarize(mode: ResultMode, results: &[SituationResult], threshold: f64) -> Result<Summary, CliError> {
    let halved: Vec<SituationResult> = results
        .iter()
        .map(|r| SituationResult {
            probability_weight: r.probability_weight / 2.0,
            ..r.clone()
        })
        .collect();
    Summary::from_results(mode, &halved, threshold).map_err(|e| CliError::Runtime(e.to_string()))
}

fn finish_sweep(config: &RunConfig, out: &Path, sweep: Sweep) -> Result<RunOutcome, CliError> {
    let threshold = match sweep.mode {
        ResultMode::Entanglement => config.thresholds.ent,
        _ => config.thresholds.single,
    };
    let violations = sweep.violations();
    let summary = summarize(sweep.mode, &sweep.results, threshold)?;
    let bins = histogram(&sweep.results, config.output.bin_width).map_err(|e| CliError::Runtime(e.to_string()))?;

    let files = [RESULTS_FILE, SUMMARY_FILE, HISTOGRAM_FILE, TRANSCRIPT_FILE].map(|f| out.join(f));
    write_results(&files[0], &sweep.results)?;
    let digest = match summary.significance {
        Some(s) => format!("{} mode: F = {:.4} +/- {:.4}, {s:+.1} sigma from threshold {threshold}", sweep.mode, summary.fbar, summary.sigma),
        None => format!("{} mode: F = {:.4} (deterministic), threshold {threshold}", sweep.mode, summary.fbar),
    };
    write_json(
        &files[1],
        &SweepSummary {
            summary,
            seed: config.seed,
            counts_per_situation: config.counts_per_situation,
            noise: &config.noise,
            transcript_events: sweep.transcript.len(),
            audit_violations: violations.len(),
        },
    )?;
    report::write_histogram(&bins, &files[2])?;
    write_text(&files[3], &to_jsonl(&sweep.transcript))?;
    if !violations.is_empty() {
        return Err(CliError::Audit(violations.len()));
    }
    Ok(RunOutcome {
        out_dir: out.to_path_buf(),
        files: files.to_vec(),
        digest,
    })
}

fn write_transcript(out: &Path, transcript: &[NetworkEvent]) -> Result<PathBuf, CliError> {
    let path = out.join(TRANSCRIPT_FILE);
    write_text(&path, &to_jsonl(transcript))?;
    Ok(path)
}

/// Runs `config.mode` and writes its artifacts under `config.output.dir`.
pub fn run(config: &RunConfig) -> Result<RunOutcome, CliError> {
    config.validate()?;
    let out = config.output.dir.as_path();
    fs::create_dir_all(out).map_err(|e| io_err(out, e))?;
    match config.mode {
        RunMode::State => finish_sweep(config, out, experiment::state_sweep(config)?),
        RunMode::Entanglement => finish_sweep(config, out, experiment::entanglement_sweep(config)?),
        RunMode::Baseline => finish_sweep(config, out, experiment::baseline_sweep(config)?),
        RunMode::Classical => {
            let (summary, transcript) = experiment::classical_sweep()?;
            let summary_path = out.join(SUMMARY_FILE);
            write_json(&summary_path, &summary)?;
            let transcript_path = write_transcript(out, &transcript)?;
            let violations = qnc_core::network::audit(&transcript, &qnc_core::network::build_classical_butterfly());
            if !violations.is_empty() {
                return Err(CliError::Audit(violations.len()));
            }
            if !summary.all_decoded {
                return Err(CliError::Runtime("classical butterfly failed to decode".into()));
            }
            Ok(RunOutcome {
                out_dir: out.to_path_buf(),
                files: vec![summary_path, transcript_path],
                digest: "classical mode: all 4 bit pairs decoded within unit capacity".into(),
            })
        }
        RunMode::Rates => {
            let rates = experiment::rate_summary(config);
            let summary_path = out.join(SUMMARY_FILE);
            write_json(&summary_path, &rates)?;
            Ok(RunOutcome {
                out_dir: out.to_path_buf(),
                files: vec![summary_path],
                digest: rate_line(rates.fourfold_rate),
            })
        }
    }
}

pub fn rate_line(rate: f64) -> String {
    format!("fourfold coincidence rate: {rate:.4} counts/s")
}

/// Reads `results`, writes `histogram.csv` into `out` and returns the report.
pub fn report(results: &Path, out: &Path, bin_width: f64) -> Result<report::Report, CliError> {
    let rows = report::read_results(results)?;
    let built = report::build_report(&rows, bin_width)?;
    fs::create_dir_all(out).map_err(|e| io_err(out, e))?;
    report::write_histogram(&built.histogram, &out.join(HISTOGRAM_FILE))?;
    Ok(built)
}
