mod common;

use common::*;
use qnc_core::noise::NoiseModel;
use qnc_core::protocol::{
    bell_pair, bsm_forced, correction_unitary, run_entanglement_mode, run_state_mode, BellKind,
    StateLabel,
};
use qnc_core::quantum::{fidelity, DensityMatrix, QuantumState};

fn noise(shared: f64, source: f64, p: f64) -> NoiseModel {
    NoiseModel {
        shared_pair_fidelity: shared,
        source_pair_fidelity: source,
        depolarizing_p: p,
        seed: 0,
    }
}

fn max_diff(a: &M, b: &M) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn matrix_oracle_agrees_with_closed_form() {
    for (shared, source, p) in [(1.0, 1.0, 0.0), (0.993, 0.993, 0.0), (0.9, 0.8, 0.1)] {
        for (phi1, phi2) in [(StateLabel::H, StateLabel::L), (StateLabel::Minus, StateLabel::R)] {
            for outcomes in [(BellKind::PhiPlus, BellKind::PsiMinus), (BellKind::PsiPlus, BellKind::PhiMinus)] {
                let (prob, f1, f2) = state_mode(phi1, phi2, shared, source, p, outcomes);
                let expected = state_fidelity_closed_form(shared, source, p);
                assert!((prob - 1.0 / 16.0).abs() < 1e-12);
                assert!((f1 - expected).abs() < 1e-12, "{f1} vs {expected}");
                assert!((f2 - expected).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn state_mode_matches_matrix_oracle_everywhere() {
    let model = noise(0.97, 0.95, 0.05);
    for (phi1, phi2) in all_label_pairs() {
        for outcomes in all_outcome_pairs() {
            let run = run_state_mode(phi1, phi2, &model, 0, Some(outcomes)).unwrap();
            let (prob, f1, f2) = state_mode(phi1, phi2, 0.97, 0.95, 0.05, outcomes);
            assert!((run.outcome_weight() - prob).abs() < 1e-12);
            assert!((fidelity(&run.received_1, &phi1.state()).unwrap() - f1).abs() < 1e-12);
            assert!((fidelity(&run.received_2, &phi2.state()).unwrap() - f2).abs() < 1e-12);
        }
    }
}

#[test]
fn state_mode_received_matrices_match_oracle() {
    let (phi1, phi2) = (StateLabel::Plus, StateLabel::L);
    let outcomes = (BellKind::PsiMinus, BellKind::PhiMinus);
    let run = run_state_mode(phi1, phi2, &noise(0.95, 0.9, 0.2), 0, Some(outcomes)).unwrap();
    let pair = werner(visibility(0.95));
    let register = kron_low(
        &kron_low(&kron_low(&pair, &pair), &noisy_input(phi1, visibility(0.9))),
        &noisy_input(phi2, visibility(0.9)),
    );
    let oracle = run_circuit(register, &STATE_CIRCUIT, 0.2, outcomes, &[1], &[2]);
    assert!(max_diff(&to_matrix(&run.received_1), &oracle.received_1) < 1e-12);
    assert!(max_diff(&to_matrix(&run.received_2), &oracle.received_2) < 1e-12);
}

#[test]
fn entanglement_mode_with_werner_shared_pairs_matches_eight_qubit_oracle() {
    // v = 0.9907 on the shared pairs, ideal sources
    let shared = (3.0 * 0.9907 + 1.0) / 4.0;
    let model = noise(shared, 1.0, 0.0);
    for outcomes in [
        (BellKind::PhiPlus, BellKind::PhiPlus),
        (BellKind::PsiMinus, BellKind::PhiMinus),
        (BellKind::PsiPlus, BellKind::PsiMinus),
    ] {
        let run = run_entanglement_mode(&model, 0, Some(outcomes)).unwrap();
        let (prob, f1, f2) = entanglement_mode(shared, 1.0, 0.0, outcomes);
        let phi = bell_pair(BellKind::PhiPlus);
        assert!((run.outcome_weight() - prob).abs() < 1e-12);
        assert!((fidelity(&run.received_1, &phi).unwrap() - f1).abs() < 1e-9);
        assert!((fidelity(&run.received_2, &phi).unwrap() - f2).abs() < 1e-9);
        let closed = entanglement_fidelity_closed_form(shared, 1.0, 0.0);
        assert!((f1 - closed).abs() < 1e-12 && (f2 - closed).abs() < 1e-12);
    }
}

#[test]
fn noisy_entanglement_mode_matches_eight_qubit_oracle() {
    let model = noise(0.96, 0.93, 0.1);
    let outcomes = (BellKind::PhiMinus, BellKind::PsiPlus);
    let run = run_entanglement_mode(&model, 0, Some(outcomes)).unwrap();
    let (_, f1, f2) = entanglement_mode(0.96, 0.93, 0.1, outcomes);
    let phi = bell_pair(BellKind::PhiPlus);
    assert!((fidelity(&run.received_1, &phi).unwrap() - f1).abs() < 1e-9);
    assert!((fidelity(&run.received_2, &phi).unwrap() - f2).abs() < 1e-9);
    assert!((f1 - entanglement_fidelity_closed_form(0.96, 0.93, 0.1)).abs() < 1e-12);
}

#[test]
fn receiver_one_sees_maximally_mixed_state_before_combined_frame() {
    // S1 measures and corrects; S2 is fixed to one outcome. Averaging over
    // S1's outcomes, photon 2 must carry no information about phi1.
    let mixed = DensityMatrix::maximally_mixed(1).unwrap();
    for phi1 in StateLabel::ALL {
        let register = bell_pair(BellKind::PhiPlus)
            .tensor(&bell_pair(BellKind::PhiPlus))
            .unwrap()
            .tensor(&phi1.state())
            .unwrap()
            .tensor(&StateLabel::H.state())
            .unwrap()
            .to_density();
        for s2 in BellKind::ALL {
            let mut branches = Vec::new();
            for s1 in BellKind::ALL {
                let (o1, rho) = bsm_forced(&register, 4, 0, s1).unwrap();
                let rho = rho.apply_unitary(&correction_unitary(o1.frame), &[2]).unwrap();
                let (o2, rho) = bsm_forced(&rho, 5, 3, s2).unwrap();
                let rho = rho.apply_unitary(&correction_unitary(o2.frame), &[1]).unwrap();
                branches.push((o1.probability, rho.partial_trace(&[1]).unwrap()));
            }
            let total: f64 = branches.iter().map(|(p, _)| p).sum();
            let terms: Vec<(f64, &DensityMatrix)> = branches.iter().map(|(p, r)| (p / total, r)).collect();
            let averaged = DensityMatrix::mixture(&terms).unwrap();
            assert!(averaged.max_abs_diff(&mixed) < 1e-9, "{phi1} {s2}");
        }
    }
}

fn average_state_fidelity(model: &NoiseModel) -> f64 {
    let mut total = 0.0;
    for (phi1, phi2) in all_label_pairs() {
        for outcomes in all_outcome_pairs() {
            let run = run_state_mode(phi1, phi2, model, 0, Some(outcomes)).unwrap();
            let f = fidelity(&run.received_1, &phi1.state()).unwrap();
            total += run.outcome_weight() / 36.0 * f;
        }
    }
    total
}

#[test]
fn average_fidelity_is_monotone_in_shared_pair_fidelity() {
    let grid = [1.0, 0.993, 0.97, 0.9, 0.8];
    let mut previous = f64::INFINITY;
    for shared in grid {
        let fbar = average_state_fidelity(&noise(shared, 0.993, 0.0));
        let oracle = state_fidelity_closed_form(shared, 0.993, 0.0);
        assert!((fbar - oracle).abs() < 1e-9, "{shared}: {fbar} vs {oracle}");
        assert!(fbar <= previous + 1e-12);
        previous = fbar;
    }
}

#[test]
fn produced_states_respect_purity_bounds() {
    for model in [NoiseModel::ideal(), noise(0.993, 0.993, 0.0), noise(0.5, 0.4, 0.7)] {
        for (phi1, phi2) in [(StateLabel::H, StateLabel::R), (StateLabel::Plus, StateLabel::V)] {
            let run = run_state_mode(phi1, phi2, &model, 3, None).unwrap();
            for rho in [&run.received_1, &run.received_2] {
                let purity = rho.purity();
                assert!((0.5 - 1e-12..=1.0 + 1e-9).contains(&purity), "{purity}");
            }
        }
        let run = run_entanglement_mode(&model, 4, None).unwrap();
        for rho in [&run.received_1, &run.received_2] {
            let purity = rho.purity();
            assert!((0.25 - 1e-12..=1.0 + 1e-9).contains(&purity), "{purity}");
        }
    }
}
