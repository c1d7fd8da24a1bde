//! Independent reference model built from full Kronecker-product matrices.
//!
//! Nothing here calls into the simulator's kernels: every operator is the
//! explicit `2^n x 2^n` matrix, every channel is written out by hand.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use qnc_core::protocol::{BellKind, StateLabel};

pub type M = DMatrix<Complex64>;

const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn m2(a: [Complex64; 4]) -> M {
    M::from_row_slice(2, 2, &a)
}

pub fn id2() -> M {
    M::identity(2, 2)
}

pub fn x() -> M {
    m2([c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

pub fn y() -> M {
    m2([c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
}

pub fn z() -> M {
    m2([c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}

/// Column vector of a single-qubit input label.
pub fn label_vec(label: StateLabel) -> M {
    let v = match label {
        StateLabel::H => [c(1., 0.), c(0., 0.)],
        StateLabel::V => [c(0., 0.), c(1., 0.)],
        StateLabel::Plus => [c(S, 0.), c(S, 0.)],
        StateLabel::Minus => [c(S, 0.), c(-S, 0.)],
        StateLabel::L => [c(S, 0.), c(0., S)],
        StateLabel::R => [c(S, 0.), c(0., -S)],
    };
    M::from_column_slice(2, 1, &v)
}

/// Two-qubit Bell vector, index `a + 2 b` with `a` the first qubit.
pub fn bell_vec(kind: BellKind) -> M {
    let z0 = c(0., 0.);
    let v = match kind {
        BellKind::PhiPlus => [c(S, 0.), z0, z0, c(S, 0.)],
        BellKind::PhiMinus => [c(S, 0.), z0, z0, c(-S, 0.)],
        BellKind::PsiPlus => [z0, c(S, 0.), c(S, 0.), z0],
        BellKind::PsiMinus => [z0, c(-S, 0.), c(S, 0.), z0],
    };
    M::from_column_slice(4, 1, &v)
}

pub fn ket_bra(v: &M) -> M {
    v * v.adjoint()
}

/// Kronecker product with `low` on the low-order qubits.
pub fn kron_low(low: &M, high: &M) -> M {
    high.kronecker(low)
}

/// Full `2^n` matrix acting as `ops[q]` on qubit `q` (identity elsewhere).
pub fn embed(ops: &[(usize, M)], n: usize) -> M {
    let mut full = M::identity(1, 1);
    for q in 0..n {
        let op = ops
            .iter()
            .find(|(t, _)| *t == q)
            .map(|(_, m)| m.clone())
            .unwrap_or_else(id2);
        full = kron_low(&full, &op);
    }
    full
}

/// Rank-one two-qubit projector on `(qa, qb)` expanded into single-qubit
/// matrix units.
pub fn embed_pair_projector(v: &M, qa: usize, qb: usize, n: usize) -> M {
    let dim = 1 << n;
    let mut out = M::zeros(dim, dim);
    for a in 0..2 {
        for b in 0..2 {
            for cc in 0..2 {
                for d in 0..2 {
                    let coeff = v[(a + 2 * b, 0)] * v[(cc + 2 * d, 0)].conj();
                    if coeff.norm() == 0.0 {
                        continue;
                    }
                    let mut ua = M::zeros(2, 2);
                    ua[(a, cc)] = c(1., 0.);
                    let mut ub = M::zeros(2, 2);
                    ub[(b, d)] = c(1., 0.);
                    out += embed(&[(qa, ua), (qb, ub)], n) * coeff;
                }
            }
        }
    }
    out
}

pub fn trace(m: &M) -> Complex64 {
    m.diagonal().iter().sum()
}

pub fn werner(v: f64) -> M {
    ket_bra(&bell_vec(BellKind::PhiPlus)) * c(v, 0.) + M::identity(4, 4) * c((1. - v) / 4., 0.)
}

pub fn visibility(f: f64) -> f64 {
    (4. * f - 1.) / 3.
}

pub fn noisy_input(label: StateLabel, v: f64) -> M {
    ket_bra(&label_vec(label)) * c(v, 0.) + id2() * c((1. - v) / 2., 0.)
}

pub fn conj_by(rho: &M, u: &M) -> M {
    u * rho * u.adjoint()
}

/// `(1-p) rho + p/3 (X rho X + Y rho Y + Z rho Z)` on qubit `t`.
pub fn depolarize(rho: &M, p: f64, t: usize, n: usize) -> M {
    let mut out = rho * c(1. - p, 0.);
    for pauli in [x(), y(), z()] {
        out += conj_by(rho, &embed(&[(t, pauli)], n)) * c(p / 3., 0.);
    }
    out
}

pub fn partial_trace(rho: &M, n: usize, keep: &[usize]) -> M {
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let k = keep.len();
    let mut out = M::zeros(1 << k, 1 << k);
    let place = |bits: usize, positions: &[usize]| {
        positions
            .iter()
            .enumerate()
            .fold(0usize, |acc, (j, &p)| acc | (((bits >> j) & 1) << p))
    };
    for i in 0..(1 << k) {
        for j in 0..(1 << k) {
            let mut sum = c(0., 0.);
            for r in 0..(1 << traced.len()) {
                let base = place(r, &traced);
                sum += rho[(base | place(i, keep), base | place(j, keep))];
            }
            out[(i, j)] = sum;
        }
    }
    out
}

/// `X^m Z^n` for the frame a Bell outcome calls for.
pub fn correction(kind: BellKind) -> M {
    let (m, n) = match kind {
        BellKind::PhiPlus => (false, false),
        BellKind::PsiPlus => (true, false),
        BellKind::PhiMinus => (false, true),
        BellKind::PsiMinus => (true, true),
    };
    let xm = if m { x() } else { id2() };
    let zn = if n { z() } else { id2() };
    xm * zn
}

fn xor_kind(a: BellKind, b: BellKind) -> BellKind {
    let bits = |k: BellKind| match k {
        BellKind::PhiPlus => (false, false),
        BellKind::PsiPlus => (true, false),
        BellKind::PhiMinus => (false, true),
        BellKind::PsiMinus => (true, true),
    };
    let (a, b) = (bits(a), bits(b));
    match (a.0 ^ b.0, a.1 ^ b.1) {
        (false, false) => BellKind::PhiPlus,
        (true, false) => BellKind::PsiPlus,
        (false, true) => BellKind::PhiMinus,
        (true, true) => BellKind::PsiMinus,
    }
}

pub struct OracleRun {
    pub probability: f64,
    pub received_1: M,
    pub received_2: M,
}

/// Noise and positions shared by both modes.
pub struct Circuit {
    pub n: usize,
    pub p1: usize,
    pub p2: usize,
    pub p3: usize,
    pub p4: usize,
    pub p6: usize,
    pub p8: usize,
}

pub const STATE_CIRCUIT: Circuit = Circuit { n: 6, p1: 0, p2: 1, p3: 2, p4: 3, p6: 4, p8: 5 };
pub const ENT_CIRCUIT: Circuit = Circuit { n: 8, p1: 0, p2: 1, p3: 2, p4: 3, p6: 5, p8: 7 };

pub fn run_circuit(
    register: M,
    circ: &Circuit,
    p_dep: f64,
    outcomes: (BellKind, BellKind),
    keep_1: &[usize],
    keep_2: &[usize],
) -> OracleRun {
    let n = circ.n;
    let proj1 = embed_pair_projector(&bell_vec(outcomes.0), circ.p6, circ.p1, n);
    let mut rho = &proj1 * &register * &proj1;
    let prob1 = trace(&rho).re;
    rho /= c(prob1, 0.);
    rho = conj_by(&rho, &embed(&[(circ.p3, correction(outcomes.0))], n));

    let proj2 = embed_pair_projector(&bell_vec(outcomes.1), circ.p8, circ.p4, n);
    rho = &proj2 * &rho * &proj2;
    let prob2 = trace(&rho).re;
    rho /= c(prob2, 0.);
    rho = conj_by(&rho, &embed(&[(circ.p2, correction(outcomes.1))], n));

    if p_dep > 0.0 {
        rho = depolarize(&rho, p_dep, circ.p3, n);
        rho = depolarize(&rho, p_dep, circ.p2, n);
    }
    let u3 = correction(xor_kind(outcomes.0, outcomes.1));
    rho = conj_by(&rho, &embed(&[(circ.p2, u3.clone()), (circ.p3, u3)], n));
    OracleRun {
        probability: prob1 * prob2,
        received_1: partial_trace(&rho, n, keep_1),
        received_2: partial_trace(&rho, n, keep_2),
    }
}

/// State mode on photons `[1, 2, 3, 4, 6, 8]`; returns the outcome
/// probability and the two stream fidelities.
pub fn state_mode(
    phi1: StateLabel,
    phi2: StateLabel,
    f_shared: f64,
    f_source: f64,
    p_dep: f64,
    outcomes: (BellKind, BellKind),
) -> (f64, f64, f64) {
    let pair = werner(visibility(f_shared));
    let v_src = visibility(f_source);
    let register = kron_low(
        &kron_low(&kron_low(&pair, &pair), &noisy_input(phi1, v_src)),
        &noisy_input(phi2, v_src),
    );
    let circ = STATE_CIRCUIT;
    let run = run_circuit(register, &circ, p_dep, outcomes, &[circ.p2], &[circ.p3]);
    let fid = |rho: &M, label| (label_vec(label).adjoint() * rho * label_vec(label))[(0, 0)].re;
    (run.probability, fid(&run.received_1, phi1), fid(&run.received_2, phi2))
}

/// Entanglement mode with photon `k` at index `k - 1`; fidelities of the
/// pairs (5, 2) and (7, 3) with `|Phi+>`.
pub fn entanglement_mode(
    f_shared: f64,
    f_source: f64,
    p_dep: f64,
    outcomes: (BellKind, BellKind),
) -> (f64, f64, f64) {
    let shared = werner(visibility(f_shared));
    let source = werner(visibility(f_source));
    let register = kron_low(&kron_low(&kron_low(&shared, &shared), &source), &source);
    let circ = ENT_CIRCUIT;
    let run = run_circuit(register, &circ, p_dep, outcomes, &[4, circ.p2], &[6, circ.p3]);
    let phi = bell_vec(BellKind::PhiPlus);
    let fid = |rho: &M| (phi.adjoint() * rho * &phi)[(0, 0)].re;
    (run.probability, fid(&run.received_1), fid(&run.received_2))
}

/// Closed form of a state-mode stream fidelity: every noise source shrinks
/// the Bloch vector by its own factor.
pub fn state_fidelity_closed_form(f_shared: f64, f_source: f64, p_dep: f64) -> f64 {
    (1. + visibility(f_shared) * visibility(f_source) * (1. - 4. * p_dep / 3.)) / 2.
}

/// Closed form of an entanglement-mode pair fidelity.
pub fn entanglement_fidelity_closed_form(f_shared: f64, f_source: f64, p_dep: f64) -> f64 {
    (1. + 3. * visibility(f_shared) * visibility(f_source) * (1. - 4. * p_dep / 3.)) / 4.
}

pub fn all_outcome_pairs() -> Vec<(BellKind, BellKind)> {
    BellKind::ALL
        .iter()
        .flat_map(|&a| BellKind::ALL.iter().map(move |&b| (a, b)))
        .collect()
}

pub fn all_label_pairs() -> Vec<(StateLabel, StateLabel)> {
    StateLabel::ALL
        .iter()
        .flat_map(|&a| StateLabel::ALL.iter().map(move |&b| (a, b)))
        .collect()
}

/// `G G^dagger / Tr` for a Gaussian complex `G`: full-rank random state.
pub fn random_density<R: rand::Rng>(n_qubits: usize, rng: &mut R) -> qnc_core::quantum::DensityMatrix {
    use rand_distr::{Distribution, StandardNormal};
    let dim = 1 << n_qubits;
    let mut g = M::zeros(dim, dim);
    for e in g.iter_mut() {
        *e = c(StandardNormal.sample(rng), StandardNormal.sample(rng));
    }
    let rho = &g * g.adjoint();
    let rho = &rho / trace(&rho);
    let entries: Vec<Complex64> = (0..dim)
        .flat_map(|i| (0..dim).map(move |j| (i, j)))
        .map(|(i, j)| rho[(i, j)])
        .collect();
    qnc_core::quantum::DensityMatrix::new(n_qubits, entries).expect("valid random state")
}

/// Crate density matrix as an oracle matrix.
pub fn to_matrix(rho: &qnc_core::quantum::DensityMatrix) -> M {
    M::from_row_slice(rho.dim(), rho.dim(), rho.entries())
}
