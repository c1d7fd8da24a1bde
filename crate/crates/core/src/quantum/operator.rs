use std::fmt;

use num_complex::Complex64;

use super::kernel::{self, ONE, ZERO};
use super::{PureState, QuantumState, MAX_QUBITS, STRUCTURAL_TOL};
use crate::error::{Error, Result};

/// Whether an operator was validated as a unitary or as an observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Unitary,
    Observable,
}

/// A dense `2^n x 2^n` operator, stored row-major.
#[derive(Clone, PartialEq)]
pub struct Operator {
    n_qubits: usize,
    entries: Vec<Complex64>,
    kind: OperatorKind,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Operator")
            .field("n_qubits", &self.n_qubits)
            .field("kind", &self.kind)
            .field("entries", &self.entries)
            .finish()
    }
}

fn check_shape(n_qubits: usize, len: usize) -> Result<usize> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::Capacity(n_qubits));
    }
    let dim = 1usize << n_qubits;
    if len != dim * dim {
        return Err(Error::DimensionMismatch {
            expected: dim * dim,
            actual: len,
        });
    }
    Ok(dim)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl Operator {
    /// Builds a unitary, checking `U^dagger U = I` within 1e-9.
    pub fn unitary(n_qubits: usize, entries: Vec<Complex64>) -> Result<Self> {
        let dim = check_shape(n_qubits, entries.len())?;
        let product = kernel::matmul(&kernel::adjoint(&entries, dim), &entries, dim);
        if kernel::max_abs_diff(&product, &kernel::identity(dim)) > STRUCTURAL_TOL {
            return Err(Error::NotUnitary);
        }
        Ok(Self {
            n_qubits,
            entries,
            kind: OperatorKind::Unitary,
        })
    }

    /// Builds an observable, checking Hermiticity within 1e-9.
    pub fn observable(n_qubits: usize, entries: Vec<Complex64>) -> Result<Self> {
        let dim = check_shape(n_qubits, entries.len())?;
        if !kernel::is_hermitian(&entries, dim, STRUCTURAL_TOL) {
            return Err(Error::NotHermitian);
        }
        Ok(Self {
            n_qubits,
            entries,
            kind: OperatorKind::Observable,
        })
    }

    fn trusted(n_qubits: usize, entries: Vec<Complex64>, kind: OperatorKind) -> Self {
        Self {
            n_qubits,
            entries,
            kind,
        }
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self::trusted(n_qubits, kernel::identity(1 << n_qubits), OperatorKind::Unitary)
    }

    pub fn pauli_x() -> Self {
        Self::trusted(1, vec![ZERO, ONE, ONE, ZERO], OperatorKind::Unitary)
    }

    pub fn pauli_y() -> Self {
        Self::trusted(
            1,
            vec![ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO],
            OperatorKind::Unitary,
        )
    }

    pub fn pauli_z() -> Self {
        Self::trusted(1, vec![ONE, ZERO, ZERO, c(-1.0, 0.0)], OperatorKind::Unitary)
    }

    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::trusted(
            1,
            vec![c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)],
            OperatorKind::Unitary,
        )
    }

    /// The rank-one projector `|psi><psi|`.
    pub fn projector(state: &PureState) -> Self {
        let amps = state.amplitudes();
        let dim = amps.len();
        let mut entries = vec![ZERO; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                entries[i * dim + j] = amps[i] * amps[j].conj();
            }
        }
        Self::trusted(state.n_qubits(), entries, OperatorKind::Observable)
    }

    /// `|phi><phi| - |phi_perp><phi_perp|`, the +/-1 observable measured by a
    /// two-outcome polarization analyzer.
    pub fn dichotomic(phi: &PureState, phi_perp: &PureState) -> Result<Self> {
        Self::real_combination(&[(1.0, &Self::projector(phi)), (-1.0, &Self::projector(phi_perp))])
    }

    /// `sum_k w_k O_k` with real weights; the result is validated as an observable.
    pub fn real_combination(terms: &[(f64, &Operator)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidState("empty operator combination".into()))?
            .1;
        let mut entries = vec![ZERO; first.entries.len()];
        for (w, op) in terms {
            if op.n_qubits != first.n_qubits {
                return Err(Error::DimensionMismatch {
                    expected: first.n_qubits,
                    actual: op.n_qubits,
                });
            }
            for (e, x) in entries.iter_mut().zip(&op.entries) {
                *e += x * *w;
            }
        }
        Self::observable(first.n_qubits, entries)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim() + col]
    }

    pub fn is_hermitian(&self) -> bool {
        kernel::is_hermitian(&self.entries, self.dim(), STRUCTURAL_TOL)
    }

    pub fn is_unitary(&self) -> bool {
        let dim = self.dim();
        let product = kernel::matmul(&kernel::adjoint(&self.entries, dim), &self.entries, dim);
        kernel::max_abs_diff(&product, &kernel::identity(dim)) <= STRUCTURAL_TOL
    }

    pub fn adjoint(&self) -> Self {
        Self::trusted(self.n_qubits, kernel::adjoint(&self.entries, self.dim()), self.kind)
    }

    /// Matrix product `self * other` (apply `other` first).
    pub fn compose(&self, other: &Operator) -> Result<Self> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                actual: other.n_qubits,
            });
        }
        let entries = kernel::matmul(&self.entries, &other.entries, self.dim());
        self.with_inferred_kind(self.n_qubits, entries, other.kind)
    }

    /// Kronecker product with `self` on the low-order qubits.
    pub fn tensor(&self, other: &Operator) -> Result<Self> {
        let n = self.n_qubits + other.n_qubits;
        if n > MAX_QUBITS {
            return Err(Error::Capacity(n));
        }
        let entries = kernel::kron_mat(&self.entries, self.dim(), &other.entries, other.dim());
        self.with_inferred_kind(n, entries, other.kind)
    }

    fn with_inferred_kind(
        &self,
        n_qubits: usize,
        entries: Vec<Complex64>,
        other: OperatorKind,
    ) -> Result<Self> {
        if self.kind == other {
            let candidate = Self::trusted(n_qubits, entries, self.kind);
            let ok = match self.kind {
                OperatorKind::Unitary => true,
                OperatorKind::Observable => candidate.is_hermitian(),
            };
            if ok {
                return Ok(candidate);
            }
            return Self::unitary(n_qubits, candidate.entries);
        }
        let entries_copy = entries.clone();
        Self::unitary(n_qubits, entries).or_else(|_| Self::observable(n_qubits, entries_copy))
    }

    /// Largest elementwise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        if self.n_qubits != other.n_qubits {
            return f64::INFINITY;
        }
        kernel::max_abs_diff(&self.entries, &other.entries)
    }
}

/// Half-wave plate with its fast axis at `theta_degrees` from vertical:
/// `[[cos 2t, sin 2t], [sin 2t, -cos 2t]]`.
pub fn hwp_unitary(theta_degrees: f64) -> Operator {
    let two_theta = 2.0 * theta_degrees.to_radians();
    let (s, co) = two_theta.sin_cos();
    Operator::trusted(
        1,
        vec![c(co, 0.0), c(s, 0.0), c(s, 0.0), c(-co, 0.0)],
        OperatorKind::Unitary,
    )
}
