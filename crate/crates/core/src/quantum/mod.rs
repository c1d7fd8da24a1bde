//! Dense state-vector and density-matrix machinery for registers of up to
//! eight qubits.
//!
//! Qubit 0 is the least-significant axis of a basis index, and `|H>`/`|V>`
//! map to basis vectors 0/1. Comparisons across Pauli-frame compositions are
//! made on density matrices or fidelities, never on raw amplitudes.

mod kernel;
mod operator;
mod state;

pub use operator::{hwp_unitary, Operator, OperatorKind};
pub use state::{DensityMatrix, PureState, QuantumState};

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

/// Largest supported register.
pub const MAX_QUBITS: usize = 8;

/// Tolerance for structural invariants (norm, trace, Hermiticity, positivity).
pub const STRUCTURAL_TOL: f64 = 1e-9;

/// Tolerance for pure arithmetic identities.
pub const ARITHMETIC_TOL: f64 = 1e-12;

/// Result of a sampled projective measurement.
#[derive(Debug, Clone)]
pub struct Measurement<S> {
    pub outcome: usize,
    pub post_state: S,
    pub probability: f64,
}

/// Checks `sum_i P_i = I`, `P_i^2 = P_i` and `P_i P_j = 0` within 1e-9.
pub fn check_projectors(projectors: &[Operator]) -> Result<()> {
    let first = projectors.first().ok_or(Error::IncompleteProjectors)?;
    let n = first.n_qubits();
    if projectors.iter().any(|p| p.n_qubits() != n) {
        return Err(Error::IncompleteProjectors);
    }
    let dim = first.dim();
    let mut sum = vec![Complex64::new(0.0, 0.0); dim * dim];
    for p in projectors {
        for (s, e) in sum.iter_mut().zip(p.entries()) {
            *s += e;
        }
    }
    if kernel::max_abs_diff(&sum, &kernel::identity(dim)) > STRUCTURAL_TOL {
        return Err(Error::IncompleteProjectors);
    }
    for (i, a) in projectors.iter().enumerate() {
        for (j, b) in projectors.iter().enumerate() {
            let prod = kernel::matmul(a.entries(), b.entries(), dim);
            let expected = if i == j {
                a.entries().to_vec()
            } else {
                vec![Complex64::new(0.0, 0.0); dim * dim]
            };
            if kernel::max_abs_diff(&prod, &expected) > STRUCTURAL_TOL {
                return Err(Error::IncompleteProjectors);
            }
        }
    }
    Ok(())
}

/// Samples one outcome of a complete projective measurement on `targets`
/// by the Born rule and returns the renormalized post-state.
pub fn projective_measure<S: QuantumState, R: Rng + ?Sized>(
    state: &S,
    projectors: &[Operator],
    targets: &[usize],
    rng: &mut R,
) -> Result<Measurement<S>> {
    check_projectors(projectors)?;
    let probabilities = projectors
        .iter()
        .map(|p| state.probability(p, targets))
        .collect::<Result<Vec<_>>>()?;
    let outcome = sample_index(&probabilities, rng);
    let (post_state, probability) = state.project(&projectors[outcome], targets)?;
    Ok(Measurement {
        outcome,
        post_state,
        probability,
    })
}

/// Draws an index with probability proportional to `weights`, skipping
/// zero-weight entries.
pub(crate) fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().map(|w| w.max(0.0)).sum();
    let mut target = rng.random::<f64>() * total;
    let mut last = 0;
    for (i, w) in weights.iter().enumerate() {
        let w = w.max(0.0);
        if w <= 0.0 {
            continue;
        }
        last = i;
        if target < w {
            return i;
        }
        target -= w;
    }
    last
}

/// Fidelity `<b| rho_a |b>` of any state with a pure reference.
pub fn fidelity<S: QuantumState>(a: &S, b: &PureState) -> Result<f64> {
    if a.n_qubits() != b.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: b.n_qubits(),
            actual: a.n_qubits(),
        });
    }
    let targets: Vec<usize> = (0..b.n_qubits()).collect();
    let f = a.probability(&Operator::projector(b), &targets)?;
    Ok(f.clamp(0.0, 1.0))
}

/// `Tr(rho O)` for a Hermitian observable on the full register.
pub fn expectation(rho: &DensityMatrix, obs: &Operator) -> Result<f64> {
    if !obs.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    if rho.n_qubits() != obs.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: rho.n_qubits(),
            actual: obs.n_qubits(),
        });
    }
    let dim = rho.dim();
    let value: Complex64 = (0..dim)
        .flat_map(|i| (0..dim).map(move |k| (i, k)))
        .map(|(i, k)| rho.entry(i, k) * obs.entry(k, i))
        .sum();
    Ok(value.re)
}
