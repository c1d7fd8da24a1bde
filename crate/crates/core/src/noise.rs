//! Imperfect entangled pairs, depolarizing channels and a coincidence-rate
//! estimate for the SPDC source.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{DensityMatrix, Operator, PureState, QuantumState};

/// Fidelity of the prepared pairs with an ideal `|Phi+>`, as characterized
/// for the photon source.
pub const SOURCE_PAIR_FIDELITY: f64 = 0.993;

/// Noise configuration for a protocol run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseModel {
    /// Fidelity of the pre-shared pairs (12) and (34) with `|Phi+>`.
    pub shared_pair_fidelity: f64,
    /// Fidelity of the source pairs (56) and (78) with `|Phi+>`.
    pub source_pair_fidelity: f64,
    /// Depolarizing probability applied to each qubit crossing a quantum edge.
    pub depolarizing_p: f64,
    pub seed: u64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            shared_pair_fidelity: SOURCE_PAIR_FIDELITY,
            source_pair_fidelity: SOURCE_PAIR_FIDELITY,
            depolarizing_p: 0.0,
            seed: 0,
        }
    }
}

impl NoiseModel {
    pub fn ideal() -> Self {
        Self {
            shared_pair_fidelity: 1.0,
            source_pair_fidelity: 1.0,
            depolarizing_p: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_pair_fidelity("shared_pair_fidelity", self.shared_pair_fidelity)?;
        check_pair_fidelity("source_pair_fidelity", self.source_pair_fidelity)?;
        check_probability("depolarizing_p", self.depolarizing_p)
    }

    pub fn is_ideal(&self) -> bool {
        self.shared_pair_fidelity == 1.0
            && self.source_pair_fidelity == 1.0
            && self.depolarizing_p == 0.0
    }

    /// Werner visibility of the shared pairs.
    pub fn shared_visibility(&self) -> Result<f64> {
        v_from_fidelity(self.shared_pair_fidelity)
    }

    /// Werner visibility of the source pairs.
    pub fn source_visibility(&self) -> Result<f64> {
        v_from_fidelity(self.source_pair_fidelity)
    }
}

fn check_pair_fidelity(name: &'static str, f: f64) -> Result<()> {
    if f.is_nan() || f <= 0.25 || f > 1.0 {
        return Err(Error::InvalidParameter {
            name,
            value: f,
            reason: "pair fidelity must lie in (0.25, 1]",
        });
    }
    Ok(())
}

fn check_probability(name: &'static str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter {
            name,
            value: p,
            reason: "must lie in [0, 1]",
        });
    }
    Ok(())
}

/// SPDC source and detection parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SourceParams {
    /// Pump repetition rate in Hz.
    pub rep_rate: f64,
    /// Per-pulse single-pair generation probability.
    pub pair_prob: f64,
    /// Per-photon collection efficiency.
    pub collection_eff: f64,
    /// Success probability of the Bell-state measurements.
    pub bsm_success: f64,
}

impl Default for SourceParams {
    fn default() -> Self {
        Self {
            rep_rate: 80e6,
            pair_prob: 0.0036,
            collection_eff: 0.28,
            bsm_success: 0.25,
        }
    }
}

impl SourceParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.rep_rate >= 0.0 && self.rep_rate.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "rep_rate",
                value: self.rep_rate,
                reason: "must be a nonnegative rate",
            });
        }
        check_probability("pair_prob", self.pair_prob)?;
        check_probability("collection_eff", self.collection_eff)?;
        check_probability("bsm_success", self.bsm_success)
    }
}

fn phi_plus() -> PureState {
    PureState::normalized(
        2,
        vec![1.0.into(), 0.0.into(), 0.0.into(), 1.0.into()],
    )
    .expect("nonzero vector")
}

/// `v |Phi+><Phi+| + (1 - v) I/4`.
pub fn werner_state(v: f64) -> Result<DensityMatrix> {
    check_probability("v", v)?;
    let pure = phi_plus().to_density();
    let mixed = DensityMatrix::maximally_mixed(2)?;
    DensityMatrix::mixture(&[(v, &pure), (1.0 - v, &mixed)])
}

/// Werner visibility reproducing a given `|Phi+>` fidelity: `(4f - 1)/3`.
pub fn v_from_fidelity(f: f64) -> Result<f64> {
    check_pair_fidelity("f", f)?;
    Ok((4.0 * f - 1.0) / 3.0)
}

/// Single-qubit depolarizing channel on `target`:
/// `(1 - p) rho + p/3 (X rho X + Y rho Y + Z rho Z)`.
pub fn depolarize(rho: &DensityMatrix, p: f64, target: usize) -> Result<DensityMatrix> {
    check_probability("p", p)?;
    let x = rho.apply_unitary(&Operator::pauli_x(), &[target])?;
    if p == 0.0 {
        return Ok(rho.clone());
    }
    let y = rho.apply_unitary(&Operator::pauli_y(), &[target])?;
    let z = rho.apply_unitary(&Operator::pauli_z(), &[target])?;
    let w = p / 3.0;
    DensityMatrix::mixture(&[(1.0 - p, rho), (w, &x), (w, &y), (w, &z)])
}

/// Mixes a single-qubit state toward `I/2`: `v rho + (1 - v) I/2`.
pub(crate) fn shrink_qubit(rho: &DensityMatrix, v: f64) -> Result<DensityMatrix> {
    check_probability("v", v)?;
    let mixed = DensityMatrix::maximally_mixed(rho.n_qubits())?;
    DensityMatrix::mixture(&[(v, rho), (1.0 - v, &mixed)])
}

/// Fourfold coincidence rate in counts/s:
/// `rep_rate * pair_prob^2 * collection_eff^4 * bsm_success`.
///
/// This is an order-of-magnitude estimate. It ignores detector asymmetries
/// and filter transmission differences.
pub fn estimate_fourfold_rate(sp: &SourceParams) -> f64 {
    sp.rep_rate * sp.pair_prob.powi(2) * sp.collection_eff.powi(4) * sp.bsm_success
}
