//! Situation sweeps for each run mode.

use qnc_core::analysis::{
    expectation_from_counts, fidelity_from_counts, simulate_counts, witness_fidelity, Estimate,
    ResultMode, SituationResult,
};
use qnc_core::network::{
    audit, build_butterfly, build_classical_butterfly, classical_butterfly, NetworkEvent, Topology,
    Violation,
};
use qnc_core::noise::estimate_fourfold_rate;
use qnc_core::protocol::{
    run_baseline_measure_resend, run_entanglement_mode, run_state_mode, BellKind, StateLabel,
};
use qnc_core::quantum::{expectation, fidelity, DensityMatrix, Operator};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::RunConfig;
use crate::CliError;

/// Results of a sweep plus the transcript, re-stamped so that each event's
/// round is the index of the situation that produced it.
#[derive(Debug, Clone)]
pub struct Sweep {
    pub mode: ResultMode,
    pub results: Vec<SituationResult>,
    pub transcript: Vec<NetworkEvent>,
    pub topology: Topology,
}

impl Sweep {
    pub fn violations(&self) -> Vec<Violation> {
        audit(&self.transcript, &self.topology)
    }

    fn new(mode: ResultMode, topology: Topology) -> Self {
        Self {
            mode,
            results: Vec::new(),
            transcript: Vec::new(),
            topology,
        }
    }

    /// Rescales each stream's Born weights to sum to exactly one over the
    /// complete situation set.
    fn normalize_weights(mut self) -> Self {
        for stream in [1, 2] {
            let total: f64 = self.results.iter().filter(|r| r.stream == stream).map(|r| r.probability_weight).sum();
            for r in self.results.iter_mut().filter(|r| r.stream == stream) {
                r.probability_weight /= total;
            }
        }
        self
    }

    fn record_transcript(&mut self, index: u64, events: Vec<NetworkEvent>) {
        let round = u32::try_from(index).expect("situation count fits in u32");
        self.transcript.extend(events.into_iter().map(|mut e| {
            e.round = round;
            e
        }));
    }
}

fn core(err: qnc_core::Error) -> CliError {
    CliError::Runtime(err.to_string())
}

fn situation_rng(config: &RunConfig, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(index))
}

/// Projective-count estimate of `<phi|rho|phi>` from a simulated accumulation.
fn counted_fidelity(exact: f64, config: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Estimate, CliError> {
    let counts = simulate_counts(exact.clamp(0.0, 1.0), config.counts_per_situation as f64, rng).map_err(core)?;
    if counts.total() == 0 {
        return Err(CliError::Runtime("a situation accumulated zero coincidences".into()));
    }
    fidelity_from_counts(&counts).map_err(core)
}

fn outcome_pairs() -> impl Iterator<Item = (BellKind, BellKind)> {
    BellKind::ALL
        .into_iter()
        .flat_map(|a| BellKind::ALL.into_iter().map(move |b| (a, b)))
}

fn label_pairs() -> impl Iterator<Item = (StateLabel, StateLabel)> {
    StateLabel::ALL
        .into_iter()
        .flat_map(|a| StateLabel::ALL.into_iter().map(move |b| (a, b)))
}

/// 36 input pairs x 16 forced outcome pairs, two streams each.
pub fn state_sweep(config: &RunConfig) -> Result<Sweep, CliError> {
    let mut sweep = Sweep::new(ResultMode::State, build_butterfly());
    let mut index = 0u64;
    for (phi1, phi2) in label_pairs() {
        for outcomes in outcome_pairs() {
            let mut rng = situation_rng(config, index);
            let seed = config.seed.wrapping_add(index);
            let run = run_state_mode(phi1, phi2, &config.noise, seed, Some(outcomes)).map_err(core)?;
            let weight = run.outcome_weight() / 36.0;
            for (stream, rho, label) in [(1, &run.received_1, phi1), (2, &run.received_2, phi2)] {
                let exact = fidelity(rho, &label.state()).map_err(core)?;
                sweep.results.push(SituationResult {
                    mode: ResultMode::State,
                    phi1: Some(phi1),
                    phi2: Some(phi2),
                    outcomes: Some(outcomes),
                    stream,
                    probability_weight: weight,
                    fidelity: counted_fidelity(exact, config, &mut rng)?,
                });
            }
            sweep.record_transcript(index, run.transcript);
            index += 1;
        }
    }
    Ok(sweep.normalize_weights())
}

/// Witness fidelity of a delivered pair from XX, YY and ZZ accumulations.
fn counted_witness(rho: &DensityMatrix, config: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Estimate, CliError> {
    let mut e = Vec::with_capacity(3);
    for pauli in [Operator::pauli_x(), Operator::pauli_y(), Operator::pauli_z()] {
        let observable = pauli.tensor(&pauli).map_err(core)?;
        let exact = expectation(rho, &observable).map_err(core)?;
        let p_plus = ((1.0 + exact) / 2.0).clamp(0.0, 1.0);
        let counts = simulate_counts(p_plus, config.counts_per_situation as f64, rng).map_err(core)?;
        if counts.total() == 0 {
            return Err(CliError::Runtime("a basis setting accumulated zero coincidences".into()));
        }
        e.push(expectation_from_counts(&counts).map_err(core)?);
    }
    witness_fidelity(e[0], e[1], e[2]).map(|(f, _)| f).map_err(core)
}

/// 16 forced outcome pairs; both delivered pairs are scored by the witness.
pub fn entanglement_sweep(config: &RunConfig) -> Result<Sweep, CliError> {
    let mut sweep = Sweep::new(ResultMode::Entanglement, build_butterfly());
    for (index, outcomes) in (0u64..).zip(outcome_pairs()) {
        let mut rng = situation_rng(config, index);
        let seed = config.seed.wrapping_add(index);
        let run = run_entanglement_mode(&config.noise, seed, Some(outcomes)).map_err(core)?;
        let weight = run.outcome_weight();
        for (stream, rho) in [(1, &run.received_1), (2, &run.received_2)] {
            sweep.results.push(SituationResult {
                mode: ResultMode::Entanglement,
                phi1: None,
                phi2: None,
                outcomes: Some(outcomes),
                stream,
                probability_weight: weight,
                fidelity: counted_witness(rho, config, &mut rng)?,
            });
        }
        sweep.record_transcript(index, run.transcript);
    }
    Ok(sweep.normalize_weights())
}

/// Measure-and-resend over the 36 input pairs on the all-classical butterfly.
pub fn baseline_sweep(config: &RunConfig) -> Result<Sweep, CliError> {
    let mut sweep = Sweep::new(ResultMode::Baseline, build_classical_butterfly());
    for (index, (phi1, phi2)) in (0u64..).zip(label_pairs()) {
        let mut rng = situation_rng(config, index);
        let run = run_baseline_measure_resend(phi1, phi2, config.seed.wrapping_add(index)).map_err(core)?;
        for (stream, rho, label) in [(1, &run.received_1, phi1), (2, &run.received_2, phi2)] {
            let exact = fidelity(rho, &label.state()).map_err(core)?;
            sweep.results.push(SituationResult {
                mode: ResultMode::Baseline,
                phi1: Some(phi1),
                phi2: Some(phi2),
                outcomes: None,
                stream,
                probability_weight: 1.0 / 36.0,
                fidelity: counted_fidelity(exact, config, &mut rng)?,
            });
        }
        sweep.record_transcript(index, run.transcript);
    }
    Ok(sweep)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalCase {
    pub b1: bool,
    pub b2: bool,
    pub at_r1: bool,
    pub at_r2: bool,
    pub decoded: bool,
    pub within_capacity: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalSummary {
    pub mode: &'static str,
    pub cases: Vec<ClassicalCase>,
    pub all_decoded: bool,
}

pub fn classical_sweep() -> Result<(ClassicalSummary, Vec<NetworkEvent>), CliError> {
    let mut cases = Vec::new();
    let mut transcript = Vec::new();
    for (index, (b1, b2)) in [(false, false), (false, true), (true, false), (true, true)].into_iter().enumerate() {
        let out = classical_butterfly(b1, b2).map_err(|e| CliError::Runtime(e.to_string()))?;
        cases.push(ClassicalCase {
            b1,
            b2,
            at_r1: out.at_r1,
            at_r2: out.at_r2,
            decoded: out.at_r1 == b1 && out.at_r2 == b2,
            within_capacity: out.ledger.within_capacity(),
        });
        transcript.extend(out.transcript.into_iter().map(|mut e| {
            e.round = index as u32;
            e
        }));
    }
    let all_decoded = cases.iter().all(|c| c.decoded && c.within_capacity);
    Ok((
        ClassicalSummary {
            mode: "classical",
            cases,
            all_decoded,
        },
        transcript,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateSummary {
    pub mode: &'static str,
    pub rep_rate: f64,
    pub pair_prob: f64,
    pub collection_eff: f64,
    pub bsm_success: f64,
    pub fourfold_rate: f64,
}

pub fn rate_summary(config: &RunConfig) -> RateSummary {
    let sp = config.source;
    RateSummary {
        mode: "rates",
        rep_rate: sp.rep_rate,
        pair_prob: sp.pair_prob,
        collection_eff: sp.collection_eff,
        bsm_success: sp.bsm_success,
        fourfold_rate: estimate_fourfold_rate(&sp),
    }
}
