//! The three-step coding protocol on the butterfly network with two
//! pre-shared `|Phi+>` pairs between the senders.
//!
//! Photon numbering follows the experiment: pairs (12) and (34) are shared
//! by S1 (photons 1, 3) and S2 (photons 2, 4); pairs (56) and (78) belong to
//! S1 and S2. S1 measures photons (6, 1) in the Bell basis and corrects
//! photon 3, which travels to R2; S2 measures (8, 4) and corrects photon 2,
//! which travels to R1. C1 XORs the two frames, C2 copies the result, and both
//! receivers apply the combined correction.
//!
//! The stream injected at S1 is recovered on photon 2 at R1; the stream
//! injected at S2 is recovered on photon 3 at R2.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{
    self, build_butterfly, build_classical_butterfly, Bits, EdgeRef, EventKind, Message,
    NetworkEvent, Payload, UsageLedger,
};
use crate::noise::{self, NoiseModel};
use crate::quantum::{
    projective_measure, sample_index, DensityMatrix, Operator, PureState, QuantumState,
};

/// Pauli correction `X^m Z^n`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliFrame {
    pub m: bool,
    pub n: bool,
}

impl PauliFrame {
    pub const fn new(m: bool, n: bool) -> Self {
        Self { m, n }
    }

    pub fn from_bits(m: u8, n: u8) -> Self {
        Self::new(m & 1 == 1, n & 1 == 1)
    }

    /// All four frames in `mn` order 00, 01, 10, 11.
    pub fn all() -> [PauliFrame; 4] {
        [(false, false), (false, true), (true, false), (true, true)].map(|(m, n)| Self::new(m, n))
    }

    pub fn bits(self) -> Bits {
        Bits::pair(self.m, self.n)
    }

    pub fn from_payload_bits(bits: &Bits) -> Option<Self> {
        match bits.as_slice() {
            [m, n] => Some(Self::new(*m, *n)),
            _ => None,
        }
    }
}

impl fmt::Display for PauliFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.m as u8, self.n as u8)
    }
}

impl FromStr for PauliFrame {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "00" => Ok(Self::new(false, false)),
            "01" => Ok(Self::new(false, true)),
            "10" => Ok(Self::new(true, false)),
            "11" => Ok(Self::new(true, true)),
            _ => Err(Error::UnknownLabel(s.to_owned())),
        }
    }
}

/// `X^m Z^n` as a 2x2 unitary: Z acts first, then X.
pub fn correction_unitary(frame: PauliFrame) -> Operator {
    let mut u = Operator::identity(1);
    if frame.n {
        u = Operator::pauli_z().compose(&u).expect("single-qubit product");
    }
    if frame.m {
        u = Operator::pauli_x().compose(&u).expect("single-qubit product");
    }
    u
}

/// Bitwise XOR of two frames.
pub fn combine_frames(f1: PauliFrame, f2: PauliFrame) -> PauliFrame {
    PauliFrame::new(f1.m ^ f2.m, f1.n ^ f2.n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PhiPlus,
        BellKind::PhiMinus,
        BellKind::PsiPlus,
        BellKind::PsiMinus,
    ];

    /// The correction frame that undoes this outcome with a `|Phi+>` resource.
    pub fn frame(self) -> PauliFrame {
        match self {
            BellKind::PhiPlus => PauliFrame::new(false, false),
            BellKind::PsiPlus => PauliFrame::new(true, false),
            BellKind::PhiMinus => PauliFrame::new(false, true),
            BellKind::PsiMinus => PauliFrame::new(true, true),
        }
    }

    pub fn from_frame(frame: PauliFrame) -> Self {
        match (frame.m, frame.n) {
            (false, false) => BellKind::PhiPlus,
            (true, false) => BellKind::PsiPlus,
            (false, true) => BellKind::PhiMinus,
            (true, true) => BellKind::PsiMinus,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BellKind::PhiPlus => "PhiPlus",
            BellKind::PhiMinus => "PhiMinus",
            BellKind::PsiPlus => "PsiPlus",
            BellKind::PsiMinus => "PsiMinus",
        }
    }
}

impl fmt::Display for BellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BellKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BellKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownLabel(s.to_owned()))
    }
}

/// Normalized two-qubit Bell state.
pub fn bell_pair(kind: BellKind) -> PureState {
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let z = Complex64::new(0.0, 0.0);
    let amplitudes = match kind {
        BellKind::PhiPlus => vec![s, z, z, s],
        BellKind::PhiMinus => vec![s, z, z, -s],
        BellKind::PsiPlus => vec![z, s, s, z],
        // (|HV> - |VH>)/sqrt 2 with qubit 0 as the first letter
        BellKind::PsiMinus => vec![z, -s, s, z],
    };
    PureState::new(2, amplitudes).expect("Bell states are normalized")
}

fn bell_projectors() -> [Operator; 4] {
    BellKind::ALL.map(|k| Operator::projector(&bell_pair(k)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BsmOutcome {
    pub bell_kind: BellKind,
    pub frame: PauliFrame,
    /// Born probability of this outcome before post-selection.
    pub probability: f64,
}

impl BsmOutcome {
    fn new(bell_kind: BellKind, probability: f64) -> Self {
        Self {
            bell_kind,
            frame: bell_kind.frame(),
            probability,
        }
    }
}

/// Born probabilities of the four Bell outcomes on `(q_a, q_b)`, in
/// [`BellKind::ALL`] order.
pub fn bsm_probabilities<S: QuantumState>(state: &S, q_a: usize, q_b: usize) -> Result<[f64; 4]> {
    let projectors = bell_projectors();
    let mut out = [0.0; 4];
    for (p, proj) in out.iter_mut().zip(&projectors) {
        *p = state.probability(proj, &[q_a, q_b])?;
    }
    Ok(out)
}

/// Bell-state measurement of `(q_a, q_b)` with the outcome sampled by the
/// Born rule.
pub fn bsm<S: QuantumState, R: Rng + ?Sized>(
    state: &S,
    q_a: usize,
    q_b: usize,
    rng: &mut R,
) -> Result<(BsmOutcome, S)> {
    let m = projective_measure(state, &bell_projectors(), &[q_a, q_b], rng)?;
    Ok((
        BsmOutcome::new(BellKind::ALL[m.outcome], m.probability),
        m.post_state,
    ))
}

/// Bell-state measurement post-selected on `kind`.
pub fn bsm_forced<S: QuantumState>(
    state: &S,
    q_a: usize,
    q_b: usize,
    kind: BellKind,
) -> Result<(BsmOutcome, S)> {
    let (post, probability) = state.project(&Operator::projector(&bell_pair(kind)), &[q_a, q_b])?;
    Ok((BsmOutcome::new(kind, probability), post))
}

/// The six input states of the state-transmission experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StateLabel {
    H,
    V,
    Plus,
    Minus,
    L,
    R,
}

impl StateLabel {
    pub const ALL: [StateLabel; 6] = [
        StateLabel::H,
        StateLabel::V,
        StateLabel::Plus,
        StateLabel::Minus,
        StateLabel::L,
        StateLabel::R,
    ];

    pub fn state(self) -> PureState {
        match self {
            StateLabel::H => PureState::h(),
            StateLabel::V => PureState::v(),
            StateLabel::Plus => PureState::plus(),
            StateLabel::Minus => PureState::minus(),
            StateLabel::L => PureState::left(),
            StateLabel::R => PureState::right(),
        }
    }

    pub fn orthogonal(self) -> StateLabel {
        match self {
            StateLabel::H => StateLabel::V,
            StateLabel::V => StateLabel::H,
            StateLabel::Plus => StateLabel::Minus,
            StateLabel::Minus => StateLabel::Plus,
            StateLabel::L => StateLabel::R,
            StateLabel::R => StateLabel::L,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            StateLabel::H => "H",
            StateLabel::V => "V",
            StateLabel::Plus => "+",
            StateLabel::Minus => "-",
            StateLabel::L => "L",
            StateLabel::R => "R",
        }
    }

    /// The two-outcome analyzer `{|phi>, |phi_perp>}` for this label.
    pub fn analyzer(self) -> [Operator; 2] {
        [
            Operator::projector(&self.state()),
            Operator::projector(&self.orthogonal().state()),
        ]
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for StateLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "H" | "h" => Ok(StateLabel::H),
            "V" | "v" => Ok(StateLabel::V),
            "+" | "plus" | "Plus" => Ok(StateLabel::Plus),
            "-" | "minus" | "Minus" => Ok(StateLabel::Minus),
            "L" | "l" => Ok(StateLabel::L),
            "R" | "r" => Ok(StateLabel::R),
            _ => Err(Error::UnknownLabel(s.to_owned())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    StateMode,
    EntanglementMode,
}

/// Register positions of the photons taking part in one run.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Layout {
    pub p1: usize,
    pub p2: usize,
    pub p3: usize,
    pub p4: usize,
    pub p6: usize,
    pub p8: usize,
    /// Photons 5 and 7, present only in entanglement mode.
    pub retained: Option<(usize, usize)>,
}

impl Layout {
    /// Six-qubit register ordered as photons 1, 2, 3, 4, 6, 8.
    pub const STATE: Layout = Layout {
        p1: 0,
        p2: 1,
        p3: 2,
        p4: 3,
        p6: 4,
        p8: 5,
        retained: None,
    };

    /// Eight-qubit register; photon `k` sits at index `k - 1`.
    pub const ENTANGLEMENT: Layout = Layout {
        p1: 0,
        p2: 1,
        p3: 2,
        p4: 3,
        p6: 5,
        p8: 7,
        retained: Some((4, 6)),
    };

    pub fn photon_number(&self, index: usize) -> u8 {
        match self.retained {
            Some(_) => index as u8 + 1,
            None => [1, 2, 3, 4, 6, 8][index],
        }
    }

    /// Qubits delivered to R1 and R2, with the retained sender photon first
    /// in entanglement mode.
    pub fn receiver_keeps(&self) -> (Vec<usize>, Vec<usize>) {
        match self.retained {
            Some((p5, p7)) => (vec![p5, self.p2], vec![p7, self.p3]),
            None => (vec![self.p2], vec![self.p3]),
        }
    }
}

/// Outcome of one execution of the coding protocol.
#[derive(Debug, Clone)]
pub struct ProtocolRun {
    pub mode: Mode,
    /// Labels injected at S1 and S2 (state mode only).
    pub input_labels: Option<(StateLabel, StateLabel)>,
    pub outcome_s1: BsmOutcome,
    pub outcome_s2: BsmOutcome,
    pub combined_frame: PauliFrame,
    /// State delivered to R1: the stream injected at S1 (photon 2), or the
    /// pair (5, 2) in entanglement mode.
    pub received_1: DensityMatrix,
    /// State delivered to R2: the stream injected at S2 (photon 3), or the
    /// pair (7, 3) in entanglement mode.
    pub received_2: DensityMatrix,
    pub transcript: Vec<NetworkEvent>,
}

impl ProtocolRun {
    /// Product of the two BSM outcome probabilities, the weight of this
    /// outcome pair among all sixteen.
    pub fn outcome_weight(&self) -> f64 {
        self.outcome_s1.probability * self.outcome_s2.probability
    }
}

/// Moves messages through the butterfly while keeping the ledger and the
/// transcript in step.
struct Wire {
    ledger: UsageLedger,
    events: Vec<NetworkEvent>,
    round: u32,
}

impl Wire {
    fn new(topology: network::Topology) -> Self {
        Self {
            ledger: UsageLedger::new(topology),
            events: Vec::new(),
            round: 0,
        }
    }

    fn send(&mut self, from: &str, to: &str, payload: Payload, stream: Option<&str>) -> Result<()> {
        let edge = EdgeRef::new(from, to);
        self.ledger
            .send(&Message {
                edge: edge.clone(),
                payload: payload.clone(),
                round: self.round,
            })
            .map_err(|e| Error::InvalidState(format!("network rejected message: {e}")))?;
        self.events.push(NetworkEvent {
            round: self.round,
            kind: EventKind::Send {
                edge,
                payload,
                stream: stream.map(str::to_owned),
            },
        });
        Ok(())
    }

    fn local(&mut self, node: &str, action: String) {
        self.events.push(NetworkEvent::local(self.round, node, action));
    }

    fn push(&mut self, kind: EventKind) {
        self.events.push(NetworkEvent {
            round: self.round,
            kind,
        });
    }
}

fn measure_bell<R: Rng + ?Sized>(
    state: &DensityMatrix,
    q_a: usize,
    q_b: usize,
    forced: Option<BellKind>,
    rng: &mut R,
) -> Result<(BsmOutcome, DensityMatrix)> {
    match forced {
        Some(kind) => bsm_forced(state, q_a, q_b, kind),
        None => bsm(state, q_a, q_b, rng),
    }
}

/// Runs the three protocol steps on a prepared register.
fn execute<R: Rng + ?Sized>(
    mode: Mode,
    input_labels: Option<(StateLabel, StateLabel)>,
    register: DensityMatrix,
    layout: Layout,
    noise: &NoiseModel,
    forced: Option<(BellKind, BellKind)>,
    rng: &mut R,
) -> Result<ProtocolRun> {
    let mut wire = Wire::new(build_butterfly());
    let photon = |q: usize| layout.photon_number(q);
    let (stream_1, stream_2) = match input_labels {
        Some((a, b)) => (format!("S1:{a}"), format!("S2:{b}")),
        None => ("S1:ent".to_owned(), "S2:ent".to_owned()),
    };

    // Step 1: Bell-state measurements and sender-side corrections.
    let (outcome_s1, state) =
        measure_bell(&register, layout.p6, layout.p1, forced.map(|f| f.0), rng)?;
    wire.local(
        network::S1,
        format!("bsm({},{})={}", photon(layout.p6), photon(layout.p1), outcome_s1.bell_kind),
    );
    let state = state.apply_unitary(&correction_unitary(outcome_s1.frame), &[layout.p3])?;
    wire.local(
        network::S1,
        format!("apply X^{}Z^{} to photon {}", outcome_s1.frame.m as u8, outcome_s1.frame.n as u8, photon(layout.p3)),
    );

    let (outcome_s2, state) =
        measure_bell(&state, layout.p8, layout.p4, forced.map(|f| f.1), rng)?;
    wire.local(
        network::S2,
        format!("bsm({},{})={}", photon(layout.p8), photon(layout.p4), outcome_s2.bell_kind),
    );
    let state = state.apply_unitary(&correction_unitary(outcome_s2.frame), &[layout.p2])?;
    wire.local(
        network::S2,
        format!("apply X^{}Z^{} to photon {}", outcome_s2.frame.m as u8, outcome_s2.frame.n as u8, photon(layout.p2)),
    );

    // Step 2: qubits on the direct edges, frames through the coding nodes.
    wire.send(
        network::S1,
        network::R2,
        Payload::Qubit { photon: photon(layout.p3) },
        Some(&stream_2),
    )?;
    wire.send(
        network::S2,
        network::R1,
        Payload::Qubit { photon: photon(layout.p2) },
        Some(&stream_1),
    )?;
    let mut state = state;
    if noise.depolarizing_p > 0.0 {
        state = noise::depolarize(&state, noise.depolarizing_p, layout.p3)?;
        state = noise::depolarize(&state, noise.depolarizing_p, layout.p2)?;
    }
    let f1 = outcome_s1.frame.bits();
    let f2 = outcome_s2.frame.bits();
    wire.send(network::S1, network::C1, Payload::Classical { bits: f1.clone() }, None)?;
    wire.send(network::S2, network::C1, Payload::Classical { bits: f2.clone() }, None)?;
    let coded = network::xor_node(&f1, &f2)
        .map_err(|e| Error::InvalidState(e.to_string()))?;
    wire.push(EventKind::Xor {
        node: network::C1.into(),
        inputs: (f1, f2),
        output: coded.clone(),
    });
    wire.send(network::C1, network::C2, Payload::Classical { bits: coded.clone() }, None)?;
    let coded_payload = Payload::Classical { bits: coded };
    let (to_r1, to_r2) =
        network::copy_node(&coded_payload).map_err(|e| Error::InvalidState(e.to_string()))?;
    wire.push(EventKind::Copy {
        node: network::C2.into(),
        payload: coded_payload,
    });
    wire.send(network::C2, network::R1, to_r1.clone(), None)?;
    wire.send(network::C2, network::R2, to_r2, None)?;

    // Step 3: both receivers apply the combined frame.
    let combined_frame = combine_frames(outcome_s1.frame, outcome_s2.frame);
    debug_assert!(matches!(&to_r1, Payload::Classical { bits } if PauliFrame::from_payload_bits(bits) == Some(combined_frame)));
    let u3 = correction_unitary(combined_frame);
    let state = state
        .apply_unitary(&u3, &[layout.p2])?
        .apply_unitary(&u3, &[layout.p3])?;
    for (node, q) in [(network::R1, layout.p2), (network::R2, layout.p3)] {
        wire.local(
            node,
            format!("apply X^{}Z^{} to photon {}", combined_frame.m as u8, combined_frame.n as u8, photon(q)),
        );
    }

    let (keep_1, keep_2) = layout.receiver_keeps();
    Ok(ProtocolRun {
        mode,
        input_labels,
        outcome_s1,
        outcome_s2,
        combined_frame,
        received_1: state.partial_trace(&keep_1)?,
        received_2: state.partial_trace(&keep_2)?,
        transcript: wire.events,
    })
}

/// State-transmission mode: `phi1` enters at S1 and `phi2` at S2.
///
/// Photons 6 and 8 are prepared directly in the input states; imperfect
/// source pairs enter as the matching depolarized input
/// `v rho + (1 - v) I/2`. With `forced` the two Bell measurements are
/// post-selected on the given outcomes instead of sampled.
pub fn run_state_mode(
    phi1: StateLabel,
    phi2: StateLabel,
    noise: &NoiseModel,
    seed: u64,
    forced: Option<(BellKind, BellKind)>,
) -> Result<ProtocolRun> {
    noise.validate()?;
    let shared = noise::werner_state(noise.shared_visibility()?)?;
    let v_source = noise.source_visibility()?;
    let input_1 = noise::shrink_qubit(&phi1.state().to_density(), v_source)?;
    let input_2 = noise::shrink_qubit(&phi2.state().to_density(), v_source)?;
    let register = shared
        .tensor(&shared)?
        .tensor(&input_1)?
        .tensor(&input_2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    execute(
        Mode::StateMode,
        Some((phi1, phi2)),
        register,
        Layout::STATE,
        noise,
        forced,
        &mut rng,
    )
}

/// Entanglement-distribution mode: photons 5 and 7 are kept, and the pairs
/// (5, 2) and (7, 3) end up entangled.
pub fn run_entanglement_mode(
    noise: &NoiseModel,
    seed: u64,
    forced: Option<(BellKind, BellKind)>,
) -> Result<ProtocolRun> {
    noise.validate()?;
    let shared = noise::werner_state(noise.shared_visibility()?)?;
    let source = noise::werner_state(noise.source_visibility()?)?;
    let register = shared.tensor(&shared)?.tensor(&source)?.tensor(&source)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    execute(
        Mode::EntanglementMode,
        None,
        register,
        Layout::ENTANGLEMENT,
        noise,
        forced,
        &mut rng,
    )
}

/// Measure-and-resend strategy without prior entanglement.
#[derive(Debug, Clone)]
pub struct BaselineRun {
    pub input_labels: (StateLabel, StateLabel),
    /// Z-basis results at S1 and S2 (`true` = V).
    pub measured: (bool, bool),
    /// Re-prepared copy of the stream injected at S1 (delivered to R2).
    pub received_1: DensityMatrix,
    /// Re-prepared copy of the stream injected at S2 (delivered to R1).
    pub received_2: DensityMatrix,
    pub transcript: Vec<NetworkEvent>,
}

/// Each sender measures its input in the Z basis and sends the result bit
/// over its direct edge; the receiver re-prepares `|H>` or `|V>`.
///
/// The direct edges carry bits here, so the transcript is admissible on the
/// all-classical butterfly.
pub fn run_baseline_measure_resend(
    phi1: StateLabel,
    phi2: StateLabel,
    seed: u64,
) -> Result<BaselineRun> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut wire = Wire::new(build_classical_butterfly());
    let z_basis = StateLabel::H.analyzer();
    let m1 = projective_measure(&phi1.state(), &z_basis, &[0], &mut rng)?.outcome == 1;
    let m2 = projective_measure(&phi2.state(), &z_basis, &[0], &mut rng)?.outcome == 1;
    wire.local(network::S1, format!("measure Z = {}", m1 as u8));
    wire.local(network::S2, format!("measure Z = {}", m2 as u8));
    wire.send(network::S1, network::R2, Payload::Classical { bits: Bits::single(m1) }, None)?;
    wire.send(network::S2, network::R1, Payload::Classical { bits: Bits::single(m2) }, None)?;
    let prepare = |v: bool| if v { PureState::v() } else { PureState::h() }.to_density();
    wire.local(network::R2, format!("prepare {}", if m1 { "V" } else { "H" }));
    wire.local(network::R1, format!("prepare {}", if m2 { "V" } else { "H" }));
    Ok(BaselineRun {
        input_labels: (phi1, phi2),
        measured: (m1, m2),
        received_1: prepare(m1),
        received_2: prepare(m2),
        transcript: wire.events,
    })
}

/// Analyzer settings of the linear-optics Bell-state measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BsmSetting {
    /// HWP at 0 degrees: identifies `Phi+` and `Phi-`.
    S0,
    /// HWP at 45 degrees: identifies `Psi+` and `Psi-`.
    S45,
}

impl BsmSetting {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        if rng.random::<bool>() {
            BsmSetting::S45
        } else {
            BsmSetting::S0
        }
    }
}

/// Whether a PBS-based Bell analyzer in `setting` identifies `outcome`.
pub fn linear_optics_filter(outcome: &BsmOutcome, setting: BsmSetting) -> bool {
    matches!(
        (setting, outcome.bell_kind),
        (BsmSetting::S0, BellKind::PhiPlus | BellKind::PhiMinus)
            | (BsmSetting::S45, BellKind::PsiPlus | BellKind::PsiMinus)
    )
}

/// Draws a Bell outcome from explicit probabilities, in [`BellKind::ALL`] order.
pub fn sample_bell_outcome<R: Rng + ?Sized>(probabilities: &[f64; 4], rng: &mut R) -> BsmOutcome {
    let i = sample_index(probabilities, rng);
    BsmOutcome::new(BellKind::ALL[i], probabilities[i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::audit;
    use crate::quantum::fidelity;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bell_pair_amplitudes() {
        let h = FRAC_1_SQRT_2;
        let phi = bell_pair(BellKind::PhiPlus);
        let re: Vec<f64> = phi.amplitudes().iter().map(|a| a.re).collect();
        assert_eq!(re, vec![h, 0.0, 0.0, h]);
        let psi = bell_pair(BellKind::PsiPlus);
        let re: Vec<f64> = psi.amplitudes().iter().map(|a| a.re).collect();
        assert_eq!(re, vec![0.0, h, h, 0.0]);
        let phi_minus = phi.apply_unitary(&Operator::pauli_z(), &[0]).unwrap();
        assert_eq!(phi_minus.amplitudes(), bell_pair(BellKind::PhiMinus).amplitudes());
    }

    #[test]
    fn bell_basis_is_complete() {
        crate::quantum::check_projectors(&bell_projectors()).unwrap();
    }

    #[test]
    fn correction_examples() {
        assert!(correction_unitary(PauliFrame::new(false, false)).max_abs_diff(&Operator::identity(1)) < 1e-12);
        assert!(correction_unitary(PauliFrame::new(false, true)).max_abs_diff(&Operator::pauli_z()) < 1e-12);
        let xz = correction_unitary(PauliFrame::new(true, true));
        let expected = [0.0, -1.0, 1.0, 0.0];
        for (e, x) in xz.entries().iter().zip(expected) {
            assert_abs_diff_eq!(e.re, x, epsilon = 1e-12);
            assert_abs_diff_eq!(e.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn combine_examples() {
        let f = PauliFrame::from_bits;
        assert_eq!(combine_frames(f(0, 0), f(0, 0)), f(0, 0));
        assert_eq!(combine_frames(f(1, 0), f(0, 1)), f(1, 1));
        assert_eq!(combine_frames(f(1, 1), f(1, 1)), f(0, 0));
    }

    #[test]
    fn frame_map_round_trips() {
        for k in BellKind::ALL {
            assert_eq!(BellKind::from_frame(k.frame()), k);
            assert_eq!(k.name().parse::<BellKind>().unwrap(), k);
        }
        for f in PauliFrame::all() {
            assert_eq!(f.to_string().parse::<PauliFrame>().unwrap(), f);
        }
    }

    #[test]
    fn bsm_on_phi_plus_is_certain() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (out, _) = bsm(&bell_pair(BellKind::PhiPlus), 0, 1, &mut rng).unwrap();
        assert_eq!(out.bell_kind, BellKind::PhiPlus);
        assert_eq!(out.frame, PauliFrame::new(false, false));
        assert_abs_diff_eq!(out.probability, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bsm_on_input_and_half_pair_is_uniform() {
        for label in StateLabel::ALL {
            let state = label.state().tensor(&bell_pair(BellKind::PhiPlus)).unwrap();
            let probs = bsm_probabilities(&state, 0, 1).unwrap();
            for p in probs {
                assert_abs_diff_eq!(p, 0.25, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn bsm_on_hh() {
        let hh = PureState::basis(2, 0).unwrap();
        let probs = bsm_probabilities(&hh, 0, 1).unwrap();
        assert_abs_diff_eq!(probs[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(probs[1], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(probs[2], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(probs[3], 0.0, epsilon = 1e-12);
        assert_eq!(
            bsm_forced(&hh, 0, 1, BellKind::PsiPlus).unwrap_err(),
            Error::ZeroProbability
        );
    }

    #[test]
    fn ideal_state_mode_is_perfect_for_forced_examples() {
        let ideal = NoiseModel::ideal();
        let run = run_state_mode(StateLabel::H, StateLabel::R, &ideal, 11, None).unwrap();
        assert_abs_diff_eq!(fidelity(&run.received_1, &PureState::h()).unwrap(), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(fidelity(&run.received_2, &PureState::right()).unwrap(), 1.0, epsilon = 1e-9);

        let run = run_state_mode(
            StateLabel::Plus,
            StateLabel::Plus,
            &ideal,
            0,
            Some((BellKind::PsiMinus, BellKind::PsiPlus)),
        )
        .unwrap();
        assert_eq!(run.combined_frame, PauliFrame::new(false, true));
        assert_abs_diff_eq!(fidelity(&run.received_1, &PureState::plus()).unwrap(), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(fidelity(&run.received_2, &PureState::plus()).unwrap(), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(run.outcome_weight(), 1.0 / 16.0, epsilon = 1e-12);
    }

    #[test]
    fn h_v_all_outcome_pairs() {
        let ideal = NoiseModel::ideal();
        let mut perfect = 0;
        for a in BellKind::ALL {
            for b in BellKind::ALL {
                let run = run_state_mode(StateLabel::H, StateLabel::V, &ideal, 0, Some((a, b))).unwrap();
                let f1 = fidelity(&run.received_1, &PureState::h()).unwrap();
                let f2 = fidelity(&run.received_2, &PureState::v()).unwrap();
                if (f1 - 1.0).abs() < 1e-9 && (f2 - 1.0).abs() < 1e-9 {
                    perfect += 1;
                }
            }
        }
        assert_eq!(perfect, 16);
    }

    #[test]
    fn entanglement_mode_is_perfect_when_ideal() {
        let phi = bell_pair(BellKind::PhiPlus);
        for a in BellKind::ALL {
            for b in BellKind::ALL {
                let run = run_entanglement_mode(&NoiseModel::ideal(), 0, Some((a, b))).unwrap();
                assert_abs_diff_eq!(fidelity(&run.received_1, &phi).unwrap(), 1.0, epsilon = 1e-9);
                assert_abs_diff_eq!(fidelity(&run.received_2, &phi).unwrap(), 1.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn transcripts_are_admissible() {
        let run = run_state_mode(StateLabel::L, StateLabel::Minus, &NoiseModel::default(), 5, None).unwrap();
        assert!(audit(&run.transcript, &build_butterfly()).is_empty());
        let sends = run
            .transcript
            .iter()
            .filter(|e| matches!(e.kind, EventKind::Send { .. }))
            .count();
        assert_eq!(sends, 7);
        let base = run_baseline_measure_resend(StateLabel::Plus, StateLabel::V, 1).unwrap();
        assert!(audit(&base.transcript, &build_classical_butterfly()).is_empty());
    }

    #[test]
    fn baseline_examples() {
        let run = run_baseline_measure_resend(StateLabel::H, StateLabel::V, 9).unwrap();
        assert_abs_diff_eq!(fidelity(&run.received_1, &PureState::h()).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fidelity(&run.received_2, &PureState::v()).unwrap(), 1.0, epsilon = 1e-12);
        for seed in 0..8 {
            let run = run_baseline_measure_resend(StateLabel::Plus, StateLabel::L, seed).unwrap();
            assert_abs_diff_eq!(fidelity(&run.received_1, &PureState::plus()).unwrap(), 0.5, epsilon = 1e-12);
            assert_abs_diff_eq!(fidelity(&run.received_2, &PureState::left()).unwrap(), 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn linear_optics_assignment() {
        let phi = BsmOutcome::new(BellKind::PhiPlus, 0.25);
        let psi = BsmOutcome::new(BellKind::PsiPlus, 0.25);
        assert!(linear_optics_filter(&phi, BsmSetting::S0));
        assert!(!linear_optics_filter(&psi, BsmSetting::S0));
        assert!(linear_optics_filter(&psi, BsmSetting::S45));
        assert!(!linear_optics_filter(&phi, BsmSetting::S45));
    }

    #[test]
    fn linear_optics_joint_acceptance() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(25);
        let runs = 100_000;
        let mut accepted = 0;
        for _ in 0..runs {
            let mut joint = true;
            for _ in 0..2 {
                let a = StateLabel::ALL[rng.random_range(0..6)].state();
                let b = StateLabel::ALL[rng.random_range(0..6)].state();
                let probs = bsm_probabilities(&a.tensor(&b).unwrap(), 0, 1).unwrap();
                let outcome = sample_bell_outcome(&probs, &mut rng);
                joint &= linear_optics_filter(&outcome, BsmSetting::random(&mut rng));
            }
            accepted += joint as u32;
        }
        let rate = f64::from(accepted) / runs as f64;
        assert!((rate - 0.25).abs() < 0.005, "{rate}");
    }

    #[test]
    fn labels_parse() {
        for l in StateLabel::ALL {
            assert_eq!(l.symbol().parse::<StateLabel>().unwrap(), l);
            assert_abs_diff_eq!(
                fidelity(&l.state(), &l.orthogonal().state()).unwrap(),
                0.0,
                epsilon = 1e-12
            );
        }
        assert!("Q".parse::<StateLabel>().is_err());
    }

    #[test]
    fn invalid_noise_is_rejected() {
        let bad = NoiseModel {
            source_pair_fidelity: 0.1,
            ..NoiseModel::ideal()
        };
        assert!(matches!(
            run_state_mode(StateLabel::H, StateLabel::H, &bad, 0, None),
            Err(Error::InvalidParameter { .. })
        ));
        assert!(run_entanglement_mode(&bad, 0, None).is_err());
    }
}
