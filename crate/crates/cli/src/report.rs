//! Bar-pair tables and histogram data from a results file.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use qnc_core::analysis::{histogram, CsvRow, HistogramBin, ResultMode, SituationResult};
use serde::Serialize;

use crate::CliError;

/// Fidelities of the two simultaneously delivered streams of one situation,
/// averaged over whatever the situation key does not fix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarPair {
    pub situation: String,
    pub stream_1: f64,
    pub stream_2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub mode: ResultMode,
    pub bars: Vec<BarPair>,
    pub histogram: Vec<HistogramBin>,
}

pub fn read_results(path: &Path) -> Result<Vec<SituationResult>, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut results = Vec::new();
    for row in reader.deserialize::<CsvRow>() {
        let row = row.map_err(|e| CliError::Corrupt(format!("{}: {e}", path.display())))?;
        results.push(SituationResult::try_from(row).map_err(|e| CliError::Corrupt(e.to_string()))?);
    }
    if results.is_empty() {
        return Err(CliError::Corrupt(format!("{}: no result rows", path.display())));
    }
    Ok(results)
}

fn situation_key(r: &SituationResult) -> String {
    match r.mode {
        ResultMode::Entanglement => {
            let (a, b) = r.outcomes.expect("entanglement rows carry outcomes");
            format!("{}/{}", a.frame(), b.frame())
        }
        _ => format!(
            "{}{}",
            r.phi1.map_or("-", |l| l.symbol()),
            r.phi2.map_or("-", |l| l.symbol())
        ),
    }
}

pub fn build_report(results: &[SituationResult], bin_width: f64) -> Result<Report, CliError> {
    let mode = results[0].mode;
    if results.iter().any(|r| r.mode != mode) {
        return Err(CliError::Corrupt("results mix several modes".into()));
    }
    if mode == ResultMode::Entanglement && results.iter().any(|r| r.outcomes.is_none()) {
        return Err(CliError::Corrupt("entanglement rows need outcome frames".into()));
    }
    // key -> (first-seen order, [sum w F, sum w] per stream)
    let mut groups: BTreeMap<String, (usize, [[f64; 2]; 2])> = BTreeMap::new();
    for r in results {
        let next = groups.len();
        let entry = groups.entry(situation_key(r)).or_insert((next, [[0.0; 2]; 2]));
        let acc = &mut entry.1[usize::from(r.stream - 1)];
        acc[0] += r.probability_weight * r.fidelity.value;
        acc[1] += r.probability_weight;
    }
    let mut ordered: Vec<_> = groups.into_iter().collect();
    ordered.sort_by_key(|(_, (order, _))| *order);
    let mean = |acc: [f64; 2]| if acc[1] > 0.0 { acc[0] / acc[1] } else { f64::NAN };
    let bars = ordered
        .into_iter()
        .map(|(situation, (_, [s1, s2]))| BarPair {
            situation,
            stream_1: mean(s1),
            stream_2: mean(s2),
        })
        .collect();
    let histogram = histogram(results, bin_width).map_err(|e| CliError::Runtime(e.to_string()))?;
    Ok(Report { mode, bars, histogram })
}

impl Report {
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} mode, {} situations", self.mode, self.bars.len());
        let _ = writeln!(out, "{:<12} {:>9} {:>9}", "situation", "stream 1", "stream 2");
        for bar in &self.bars {
            let _ = writeln!(out, "{:<12} {:>9.4} {:>9.4}", bar.situation, bar.stream_1, bar.stream_2);
        }
        out
    }
}

pub fn write_histogram(bins: &[HistogramBin], path: &Path) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Row {
        lower: f64,
        upper: f64,
        mass: f64,
    }
    let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut writer = csv::Writer::from_path(path).map_err(io)?;
    for b in bins {
        writer
            .serialize(Row {
                lower: b.lower,
                upper: b.lower + b.width,
                mass: b.mass,
            })
            .map_err(io)?;
    }
    writer.flush().map_err(|e| CliError::Io(e.to_string()))
}
