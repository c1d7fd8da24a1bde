//! Python bindings for the butterfly quantum network coding simulator.
//!
//! ```python
//! import qnc
//! run = qnc.run_state_mode("H", "+", qnc.NoiseModel(), seed=1)
//! qnc.fidelity(run.received_1, qnc.PureState.h())
//! ```

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use qnc_core::analysis::{self, CountRecord, Estimate};
use qnc_core::network::{self, build_butterfly, build_classical_butterfly};
use qnc_core::noise::{self, SourceParams};
use qnc_core::protocol::{self, BellKind, StateLabel};
use qnc_core::quantum::{self, QuantumState};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn bell_kind(name: &str) -> PyResult<BellKind> {
    name.parse().map_err(value_err)
}

fn state_label(name: &str) -> PyResult<StateLabel> {
    name.parse().map_err(value_err)
}

#[pyclass(name = "PureState", module = "qnc", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyPureState(quantum::PureState);

#[pymethods]
impl PyPureState {
    #[new]
    fn new(amplitudes: Vec<Complex64>) -> PyResult<Self> {
        let n = amplitudes.len().trailing_zeros() as usize;
        if amplitudes.len() != 1 << n {
            return Err(PyValueError::new_err("length must be a power of two"));
        }
        quantum::PureState::new(n, amplitudes).map(Self).map_err(value_err)
    }

    /// One of the six input labels: H, V, +, -, L, R.
    #[staticmethod]
    fn label(name: &str) -> PyResult<Self> {
        Ok(Self(state_label(name)?.state()))
    }

    #[staticmethod]
    fn h() -> Self {
        Self(quantum::PureState::h())
    }

    #[staticmethod]
    fn v() -> Self {
        Self(quantum::PureState::v())
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.0.n_qubits()
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.0.amplitudes().to_vec()
    }

    fn tensor(&self, other: &PyPureState) -> PyResult<Self> {
        self.0.tensor(&other.0).map(Self).map_err(value_err)
    }

    fn to_density(&self) -> PyDensityMatrix {
        PyDensityMatrix(self.0.to_density())
    }

    fn __repr__(&self) -> String {
        format!("PureState(n_qubits={})", self.0.n_qubits())
    }
}

#[pyclass(name = "DensityMatrix", module = "qnc", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyDensityMatrix(quantum::DensityMatrix);

#[pymethods]
impl PyDensityMatrix {
    /// Row-major square matrix given as a list of rows.
    #[new]
    fn new(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let dim = rows.len();
        let n = dim.trailing_zeros() as usize;
        if dim == 0 || dim != 1 << n || rows.iter().any(|r| r.len() != dim) {
            return Err(PyValueError::new_err("expected a square 2^n x 2^n matrix"));
        }
        quantum::DensityMatrix::new(n, rows.concat()).map(Self).map_err(value_err)
    }

    #[staticmethod]
    fn maximally_mixed(n_qubits: usize) -> PyResult<Self> {
        quantum::DensityMatrix::maximally_mixed(n_qubits).map(Self).map_err(value_err)
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.0.n_qubits()
    }

    fn entries(&self) -> Vec<Vec<Complex64>> {
        self.0.entries().chunks(self.0.dim()).map(<[_]>::to_vec).collect()
    }

    fn trace(&self) -> f64 {
        self.0.trace().re
    }

    fn purity(&self) -> f64 {
        self.0.purity()
    }

    fn partial_trace(&self, keep: Vec<usize>) -> PyResult<Self> {
        self.0.partial_trace(&keep).map(Self).map_err(value_err)
    }

    fn apply_unitary(&self, op: &PyOperator, targets: Vec<usize>) -> PyResult<Self> {
        self.0.apply_unitary(&op.0, &targets).map(Self).map_err(value_err)
    }

    fn expectation(&self, op: &PyOperator) -> PyResult<f64> {
        quantum::expectation(&self.0, &op.0).map_err(value_err)
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(n_qubits={}, purity={:.6})", self.0.n_qubits(), self.0.purity())
    }
}

#[pyclass(name = "Operator", module = "qnc", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyOperator(quantum::Operator);

#[pymethods]
impl PyOperator {
    #[staticmethod]
    fn pauli(name: &str) -> PyResult<Self> {
        Ok(Self(match name {
            "I" => quantum::Operator::identity(1),
            "X" => quantum::Operator::pauli_x(),
            "Y" => quantum::Operator::pauli_y(),
            "Z" => quantum::Operator::pauli_z(),
            _ => return Err(PyValueError::new_err(format!("unknown Pauli `{name}`"))),
        }))
    }

    #[staticmethod]
    fn projector(state: &PyPureState) -> Self {
        Self(quantum::Operator::projector(&state.0))
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.0.n_qubits()
    }

    fn entries(&self) -> Vec<Vec<Complex64>> {
        self.0.entries().chunks(self.0.dim()).map(<[_]>::to_vec).collect()
    }

    fn tensor(&self, other: &PyOperator) -> PyResult<Self> {
        self.0.tensor(&other.0).map(Self).map_err(value_err)
    }
}

#[pyclass(name = "NoiseModel", module = "qnc", from_py_object)]
#[derive(Clone)]
pub struct PyNoiseModel(noise::NoiseModel);

#[pymethods]
impl PyNoiseModel {
    #[new]
    #[pyo3(signature = (shared_pair_fidelity = 0.993, source_pair_fidelity = 0.993, depolarizing_p = 0.0))]
    fn new(shared_pair_fidelity: f64, source_pair_fidelity: f64, depolarizing_p: f64) -> PyResult<Self> {
        let model = noise::NoiseModel {
            shared_pair_fidelity,
            source_pair_fidelity,
            depolarizing_p,
            seed: 0,
        };
        model.validate().map_err(value_err)?;
        Ok(Self(model))
    }

    #[staticmethod]
    fn ideal() -> Self {
        Self(noise::NoiseModel::ideal())
    }

    #[getter]
    fn shared_pair_fidelity(&self) -> f64 {
        self.0.shared_pair_fidelity
    }

    #[getter]
    fn source_pair_fidelity(&self) -> f64 {
        self.0.source_pair_fidelity
    }

    #[getter]
    fn depolarizing_p(&self) -> f64 {
        self.0.depolarizing_p
    }

    fn __repr__(&self) -> String {
        format!(
            "NoiseModel(shared_pair_fidelity={}, source_pair_fidelity={}, depolarizing_p={})",
            self.0.shared_pair_fidelity, self.0.source_pair_fidelity, self.0.depolarizing_p
        )
    }
}

/// Outcome of one protocol execution.
#[pyclass(name = "ProtocolRun", module = "qnc", frozen, get_all, skip_from_py_object)]
pub struct PyProtocolRun {
    outcome_s1: String,
    outcome_s2: String,
    combined_frame: String,
    weight: f64,
    received_1: Py<PyDensityMatrix>,
    received_2: Py<PyDensityMatrix>,
    transcript: String,
}

fn wrap_run(py: Python<'_>, run: protocol::ProtocolRun) -> PyResult<PyProtocolRun> {
    Ok(PyProtocolRun {
        outcome_s1: run.outcome_s1.bell_kind.to_string(),
        outcome_s2: run.outcome_s2.bell_kind.to_string(),
        combined_frame: run.combined_frame.to_string(),
        weight: run.outcome_weight(),
        received_1: Py::new(py, PyDensityMatrix(run.received_1))?,
        received_2: Py::new(py, PyDensityMatrix(run.received_2))?,
        transcript: network::to_jsonl(&run.transcript),
    })
}

fn forced(outcomes: Option<(String, String)>) -> PyResult<Option<(BellKind, BellKind)>> {
    outcomes
        .map(|(a, b)| Ok((bell_kind(&a)?, bell_kind(&b)?)))
        .transpose()
}

/// Sends `phi1` from S1 to R1 and `phi2` from S2 to R2. `outcomes`, when
/// given, post-selects the two Bell measurements, e.g. `("PhiPlus", "PsiMinus")`.
#[pyfunction]
#[pyo3(signature = (phi1, phi2, noise = None, seed = 0, outcomes = None))]
fn run_state_mode(
    py: Python<'_>,
    phi1: &str,
    phi2: &str,
    noise: Option<PyNoiseModel>,
    seed: u64,
    outcomes: Option<(String, String)>,
) -> PyResult<PyProtocolRun> {
    let model = noise.map_or_else(noise::NoiseModel::default, |n| n.0);
    let run = protocol::run_state_mode(state_label(phi1)?, state_label(phi2)?, &model, seed, forced(outcomes)?)
        .map_err(value_err)?;
    wrap_run(py, run)
}

#[pyfunction]
#[pyo3(signature = (noise = None, seed = 0, outcomes = None))]
fn run_entanglement_mode(
    py: Python<'_>,
    noise: Option<PyNoiseModel>,
    seed: u64,
    outcomes: Option<(String, String)>,
) -> PyResult<PyProtocolRun> {
    let model = noise.map_or_else(noise::NoiseModel::default, |n| n.0);
    let run = protocol::run_entanglement_mode(&model, seed, forced(outcomes)?).map_err(value_err)?;
    wrap_run(py, run)
}

/// Measure-and-resend without entanglement; returns the two re-prepared states.
#[pyfunction]
#[pyo3(signature = (phi1, phi2, seed = 0))]
fn run_baseline(phi1: &str, phi2: &str, seed: u64) -> PyResult<(PyDensityMatrix, PyDensityMatrix)> {
    let run = protocol::run_baseline_measure_resend(state_label(phi1)?, state_label(phi2)?, seed).map_err(value_err)?;
    Ok((PyDensityMatrix(run.received_1), PyDensityMatrix(run.received_2)))
}

/// Bits decoded at (R1, R2).
#[pyfunction]
fn classical_butterfly(b1: bool, b2: bool) -> PyResult<(bool, bool)> {
    let out = network::classical_butterfly(b1, b2).map_err(value_err)?;
    Ok((out.at_r1, out.at_r2))
}

/// Audits a JSON-lines transcript; returns `(index, kind, detail)` per violation.
#[pyfunction]
#[pyo3(signature = (transcript, classical = false))]
fn audit(transcript: &str, classical: bool) -> PyResult<Vec<(usize, String, String)>> {
    let events = network::from_jsonl(transcript).map_err(value_err)?;
    let topology = if classical { build_classical_butterfly() } else { build_butterfly() };
    Ok(network::audit(&events, &topology)
        .into_iter()
        .map(|v| (v.index, format!("{:?}", v.kind), v.detail))
        .collect())
}

#[pyfunction]
fn bell_pair(kind: &str) -> PyResult<PyPureState> {
    Ok(PyPureState(protocol::bell_pair(bell_kind(kind)?)))
}

#[pyfunction]
fn hwp_unitary(theta_degrees: f64) -> PyOperator {
    PyOperator(quantum::hwp_unitary(theta_degrees))
}

#[pyfunction]
fn fidelity(rho: &PyDensityMatrix, psi: &PyPureState) -> PyResult<f64> {
    quantum::fidelity(&rho.0, &psi.0).map_err(value_err)
}

#[pyfunction]
fn werner_state(v: f64) -> PyResult<PyDensityMatrix> {
    noise::werner_state(v).map(PyDensityMatrix).map_err(value_err)
}

#[pyfunction]
fn v_from_fidelity(f: f64) -> PyResult<f64> {
    noise::v_from_fidelity(f).map_err(value_err)
}

#[pyfunction]
fn depolarize(rho: &PyDensityMatrix, p: f64, target: usize) -> PyResult<PyDensityMatrix> {
    noise::depolarize(&rho.0, p, target).map(PyDensityMatrix).map_err(value_err)
}

/// `(value, sigma)` of `N+ / (N+ + N-)`.
#[pyfunction]
fn fidelity_from_counts(n_plus: u64, n_minus: u64) -> PyResult<(f64, f64)> {
    let e = analysis::fidelity_from_counts(&CountRecord::new(n_plus, n_minus)).map_err(value_err)?;
    Ok((e.value, e.sigma))
}

#[pyfunction]
fn expectation_from_counts(n_plus: u64, n_minus: u64) -> PyResult<(f64, f64)> {
    let e = analysis::expectation_from_counts(&CountRecord::new(n_plus, n_minus)).map_err(value_err)?;
    Ok((e.value, e.sigma))
}

/// `(f_ent, witness)` from `(value, sigma)` pairs of XX, YY and ZZ.
#[pyfunction]
fn witness_fidelity(exx: (f64, f64), eyy: (f64, f64), ezz: (f64, f64)) -> PyResult<((f64, f64), (f64, f64))> {
    let e = |(v, s): (f64, f64)| Estimate::new(v, s);
    let (f, w) = analysis::witness_fidelity(e(exx), e(eyy), e(ezz)).map_err(value_err)?;
    Ok(((f.value, f.sigma), (w.value, w.sigma)))
}

#[pyfunction]
fn significance(value: f64, sigma: f64, threshold: f64) -> PyResult<f64> {
    analysis::significance(Estimate::new(value, sigma), threshold).map_err(value_err)
}

#[pyfunction]
#[pyo3(signature = (rep_rate = 80e6, pair_prob = 0.0036, collection_eff = 0.28, bsm_success = 0.25))]
fn estimate_fourfold_rate(rep_rate: f64, pair_prob: f64, collection_eff: f64, bsm_success: f64) -> PyResult<f64> {
    let sp = SourceParams {
        rep_rate,
        pair_prob,
        collection_eff,
        bsm_success,
    };
    sp.validate().map_err(value_err)?;
    Ok(noise::estimate_fourfold_rate(&sp))
}

#[pymodule]
fn qnc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPureState>()?;
    m.add_class::<PyDensityMatrix>()?;
    m.add_class::<PyOperator>()?;
    m.add_class::<PyNoiseModel>()?;
    m.add_class::<PyProtocolRun>()?;
    m.add_function(wrap_pyfunction!(run_state_mode, m)?)?;
    m.add_function(wrap_pyfunction!(run_entanglement_mode, m)?)?;
    m.add_function(wrap_pyfunction!(run_baseline, m)?)?;
    m.add_function(wrap_pyfunction!(classical_butterfly, m)?)?;
    m.add_function(wrap_pyfunction!(audit, m)?)?;
    m.add_function(wrap_pyfunction!(bell_pair, m)?)?;
    m.add_function(wrap_pyfunction!(hwp_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(werner_state, m)?)?;
    m.add_function(wrap_pyfunction!(v_from_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(depolarize, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity_from_counts, m)?)?;
    m.add_function(wrap_pyfunction!(expectation_from_counts, m)?)?;
    m.add_function(wrap_pyfunction!(witness_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(significance, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_fourfold_rate, m)?)?;
    m.add("SINGLE_QUBIT_THRESHOLD", analysis::SINGLE_QUBIT_THRESHOLD)?;
    m.add("ENTANGLEMENT_THRESHOLD", analysis::ENTANGLEMENT_THRESHOLD)?;
    Ok(())
}
