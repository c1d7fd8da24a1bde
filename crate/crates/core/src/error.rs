use thiserror::Error;

/// Errors raised by the simulator, protocol and estimators.
///
/// Network capacity and cloning problems are reported separately as
/// [`crate::network::NetworkError`] because the audit collects them as data.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("register of {0} qubits exceeds the {max}-qubit limit", max = crate::quantum::MAX_QUBITS)]
    Capacity(usize),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),
    #[error("partial trace needs at least one kept qubit")]
    EmptyKeep,
    #[error("projectors do not form a complete orthogonal set")]
    IncompleteProjectors,
    #[error("operator is not Hermitian")]
    NotHermitian,
    #[error("operator is not unitary")]
    NotUnitary,
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("outcome has zero probability and cannot be post-selected")]
    ZeroProbability,
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("unknown state label {0:?}")]
    UnknownLabel(String),
    #[error("estimator needs a nonzero total count")]
    ZeroCounts,
    #[error("situation weights sum to {0}, expected 1")]
    WeightSum(f64),
    #[error("significance is undefined for a zero-sigma estimate")]
    ZeroSigma,
}

pub type Result<T> = std::result::Result<T, Error>;
