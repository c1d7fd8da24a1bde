//! Sampled pure-state shots of the noisy protocol.
//!
//! Each shot draws every mixed ingredient as a random pure state (a Werner
//! pair is `|Phi+>` with probability `v` and a uniformly random Bell state
//! otherwise; a depolarized input picks up a uniformly random Pauli with
//! probability `1 - v`), runs the protocol on a state vector, and ends with a
//! single analyzer click per receiver. Averaging many shots estimates the
//! same fidelities the density-matrix route computes exactly.

use rand::Rng;

use crate::analysis::{witness_fidelity, Estimate};
use crate::error::Result;
use crate::noise::NoiseModel;
use crate::protocol::{
    bell_pair, bsm, bsm_forced, combine_frames, correction_unitary, BellKind, BsmOutcome, Layout,
    StateLabel,
};
use crate::quantum::{projective_measure, Operator, PureState, QuantumState};

/// One sampled state-mode shot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateShot {
    /// Post-selection weight: product of the forced outcome probabilities,
    /// or 1 when outcomes were sampled.
    pub weight: f64,
    pub outcomes: (BellKind, BellKind),
    /// Analyzer at R1 clicked on the input state of S1.
    pub click_1: bool,
    /// Analyzer at R2 clicked on the input state of S2.
    pub click_2: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliBasis {
    X,
    Y,
    Z,
}

impl PauliBasis {
    pub const ALL: [PauliBasis; 3] = [PauliBasis::X, PauliBasis::Y, PauliBasis::Z];

    /// Projectors on the `+1` and `-1` eigenstates.
    fn projectors(self) -> [Operator; 2] {
        match self {
            PauliBasis::X => StateLabel::Plus.analyzer(),
            PauliBasis::Y => StateLabel::L.analyzer(),
            PauliBasis::Z => StateLabel::H.analyzer(),
        }
    }
}

/// One sampled entanglement-mode shot with both pairs measured in
/// `basis x basis`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementShot {
    pub weight: f64,
    pub outcomes: (BellKind, BellKind),
    /// Product of the two +/-1 results on photons (5, 2).
    pub parity_1: i8,
    /// Product of the two +/-1 results on photons (7, 3).
    pub parity_2: i8,
}

fn random_pauli<R: Rng + ?Sized>(rng: &mut R, include_identity: bool) -> Option<Operator> {
    let choices = if include_identity { 4 } else { 3 };
    match rng.random_range(0..choices) {
        0 => Some(Operator::pauli_x()),
        1 => Some(Operator::pauli_y()),
        2 => Some(Operator::pauli_z()),
        _ => None,
    }
}

fn sample_pair<R: Rng + ?Sized>(visibility: f64, rng: &mut R) -> PureState {
    if rng.random::<f64>() < visibility {
        bell_pair(BellKind::PhiPlus)
    } else {
        bell_pair(BellKind::ALL[rng.random_range(0..4)])
    }
}

fn sample_input<R: Rng + ?Sized>(label: StateLabel, visibility: f64, rng: &mut R) -> Result<PureState> {
    let state = label.state();
    if rng.random::<f64>() < visibility {
        return Ok(state);
    }
    match random_pauli(rng, true) {
        Some(p) => state.apply_unitary(&p, &[0]),
        None => Ok(state),
    }
}

fn depolarize_shot<R: Rng + ?Sized>(
    state: PureState,
    p: f64,
    target: usize,
    rng: &mut R,
) -> Result<PureState> {
    if p > 0.0 && rng.random::<f64>() < p {
        if let Some(pauli) = random_pauli(rng, false) {
            return state.apply_unitary(&pauli, &[target]);
        }
    }
    Ok(state)
}

fn measure_bell<R: Rng + ?Sized>(
    state: &PureState,
    q_a: usize,
    q_b: usize,
    forced: Option<BellKind>,
    rng: &mut R,
) -> Result<(BsmOutcome, PureState, f64)> {
    match forced {
        Some(kind) => {
            let (outcome, post) = bsm_forced(state, q_a, q_b, kind)?;
            Ok((outcome, post, outcome.probability))
        }
        None => {
            let (outcome, post) = bsm(state, q_a, q_b, rng)?;
            Ok((outcome, post, 1.0))
        }
    }
}

/// Protocol steps on a sampled pure register. Returns the post-protocol
/// state, the outcomes and the post-selection weight.
fn run_shot<R: Rng + ?Sized>(
    register: PureState,
    layout: Layout,
    noise: &NoiseModel,
    forced: Option<(BellKind, BellKind)>,
    rng: &mut R,
) -> Result<(PureState, (BellKind, BellKind), f64)> {
    let (o1, state, w1) = measure_bell(&register, layout.p6, layout.p1, forced.map(|f| f.0), rng)?;
    let state = state.apply_unitary(&correction_unitary(o1.frame), &[layout.p3])?;
    let (o2, state, w2) = measure_bell(&state, layout.p8, layout.p4, forced.map(|f| f.1), rng)?;
    let state = state.apply_unitary(&correction_unitary(o2.frame), &[layout.p2])?;
    let state = depolarize_shot(state, noise.depolarizing_p, layout.p3, rng)?;
    let state = depolarize_shot(state, noise.depolarizing_p, layout.p2, rng)?;
    let u3 = correction_unitary(combine_frames(o1.frame, o2.frame));
    let state = state
        .apply_unitary(&u3, &[layout.p2])?
        .apply_unitary(&u3, &[layout.p3])?;
    Ok((state, (o1.bell_kind, o2.bell_kind), w1 * w2))
}

/// Samples one state-mode shot ending in a `{|phi>, |phi_perp>}` analyzer
/// click at each receiver.
pub fn sample_state_shot<R: Rng + ?Sized>(
    phi1: StateLabel,
    phi2: StateLabel,
    noise: &NoiseModel,
    forced: Option<(BellKind, BellKind)>,
    rng: &mut R,
) -> Result<StateShot> {
    noise.validate()?;
    let v_shared = noise.shared_visibility()?;
    let v_source = noise.source_visibility()?;
    let register = sample_pair(v_shared, rng)
        .tensor(&sample_pair(v_shared, rng))?
        .tensor(&sample_input(phi1, v_source, rng)?)?
        .tensor(&sample_input(phi2, v_source, rng)?)?;
    let layout = Layout::STATE;
    let (state, outcomes, weight) = run_shot(register, layout, noise, forced, rng)?;
    let click_1 = projective_measure(&state, &phi1.analyzer(), &[layout.p2], rng)?.outcome == 0;
    let click_2 = projective_measure(&state, &phi2.analyzer(), &[layout.p3], rng)?.outcome == 0;
    Ok(StateShot {
        weight,
        outcomes,
        click_1,
        click_2,
    })
}

fn parity<R: Rng + ?Sized>(
    state: &PureState,
    a: usize,
    b: usize,
    basis: PauliBasis,
    rng: &mut R,
) -> Result<(i8, PureState)> {
    let projectors = basis.projectors();
    let first = projectors_measure(state, &projectors, a, rng)?;
    let second = projectors_measure(&first.1, &projectors, b, rng)?;
    Ok((first.0 * second.0, second.1))
}

fn projectors_measure<R: Rng + ?Sized>(
    state: &PureState,
    projectors: &[Operator; 2],
    target: usize,
    rng: &mut R,
) -> Result<(i8, PureState)> {
    let m = projective_measure(state, projectors, &[target], rng)?;
    Ok((if m.outcome == 0 { 1 } else { -1 }, m.post_state))
}

/// Samples one entanglement-mode shot measuring `basis (x) basis` on the
/// delivered pairs.
pub fn sample_entanglement_shot<R: Rng + ?Sized>(
    noise: &NoiseModel,
    forced: Option<(BellKind, BellKind)>,
    basis: PauliBasis,
    rng: &mut R,
) -> Result<EntanglementShot> {
    noise.validate()?;
    let v_shared = noise.shared_visibility()?;
    let v_source = noise.source_visibility()?;
    let register = sample_pair(v_shared, rng)
        .tensor(&sample_pair(v_shared, rng))?
        .tensor(&sample_pair(v_source, rng))?
        .tensor(&sample_pair(v_source, rng))?;
    let layout = Layout::ENTANGLEMENT;
    let (state, outcomes, weight) = run_shot(register, layout, noise, forced, rng)?;
    let (p5, p7) = layout.retained.expect("entanglement layout keeps photons 5 and 7");
    let (parity_1, state) = parity(&state, p5, layout.p2, basis, rng)?;
    let (parity_2, _) = parity(&state, p7, layout.p3, basis, rng)?;
    Ok(EntanglementShot {
        weight,
        outcomes,
        parity_1,
        parity_2,
    })
}

/// Weighted mean of `+/-1` or `0/1` samples with a standard error from the
/// effective sample size `(sum w)^2 / sum w^2`.
fn weighted_mean(samples: &[(f64, f64)]) -> Estimate {
    let sum_w: f64 = samples.iter().map(|(w, _)| w).sum();
    if sum_w <= 0.0 {
        return Estimate::new(f64::NAN, f64::INFINITY);
    }
    let mean = samples.iter().map(|(w, x)| w * x).sum::<f64>() / sum_w;
    let var = samples
        .iter()
        .map(|(w, x)| w * (x - mean).powi(2))
        .sum::<f64>()
        / sum_w;
    let sum_w2: f64 = samples.iter().map(|(w, _)| w * w).sum();
    let n_eff = sum_w * sum_w / sum_w2;
    Estimate::new(mean, (var / n_eff).sqrt())
}

/// Monte Carlo estimate of both stream fidelities from `shots` state-mode shots.
pub fn estimate_state_fidelities<R: Rng + ?Sized>(
    phi1: StateLabel,
    phi2: StateLabel,
    noise: &NoiseModel,
    forced: Option<(BellKind, BellKind)>,
    shots: usize,
    rng: &mut R,
) -> Result<(Estimate, Estimate)> {
    let mut s1 = Vec::with_capacity(shots);
    let mut s2 = Vec::with_capacity(shots);
    for _ in 0..shots {
        let shot = sample_state_shot(phi1, phi2, noise, forced, rng)?;
        s1.push((shot.weight, shot.click_1 as u8 as f64));
        s2.push((shot.weight, shot.click_2 as u8 as f64));
    }
    Ok((weighted_mean(&s1), weighted_mean(&s2)))
}

/// Monte Carlo estimate of both entanglement fidelities, spending
/// `shots_per_basis` shots on each of XX, YY and ZZ.
pub fn estimate_entanglement_fidelities<R: Rng + ?Sized>(
    noise: &NoiseModel,
    forced: Option<(BellKind, BellKind)>,
    shots_per_basis: usize,
    rng: &mut R,
) -> Result<(Estimate, Estimate)> {
    let mut per_stream = [Vec::new(), Vec::new()];
    for basis in PauliBasis::ALL {
        let mut s1 = Vec::with_capacity(shots_per_basis);
        let mut s2 = Vec::with_capacity(shots_per_basis);
        for _ in 0..shots_per_basis {
            let shot = sample_entanglement_shot(noise, forced, basis, rng)?;
            s1.push((shot.weight, shot.parity_1 as f64));
            s2.push((shot.weight, shot.parity_2 as f64));
        }
        per_stream[0].push(weighted_mean(&s1));
        per_stream[1].push(weighted_mean(&s2));
    }
    let fid = |e: &[Estimate]| witness_fidelity(e[0], e[1], e[2]).map(|(f, _)| f);
    Ok((fid(&per_stream[0])?, fid(&per_stream[1])?))
}
