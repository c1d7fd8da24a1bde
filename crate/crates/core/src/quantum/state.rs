use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::kernel::{self, ONE, ZERO};
use super::{Operator, OperatorKind, MAX_QUBITS, STRUCTURAL_TOL};
use crate::error::{Error, Result};

/// Operations shared by pure and mixed registers.
pub trait QuantumState: Clone + Sized {
    fn n_qubits(&self) -> usize;

    /// Applies `u` with its qubit `j` acting on `targets[j]`.
    fn apply_unitary(&self, u: &Operator, targets: &[usize]) -> Result<Self>;

    /// Born probability of the projector `p` embedded on `targets`.
    fn probability(&self, p: &Operator, targets: &[usize]) -> Result<f64>;

    /// Projects onto `p` and renormalizes. Returns the post-state together
    /// with the Born probability of the projection.
    fn project(&self, p: &Operator, targets: &[usize]) -> Result<(Self, f64)>;

    fn to_density(&self) -> DensityMatrix;
}

fn check_register(n_qubits: usize) -> Result<usize> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::Capacity(n_qubits));
    }
    Ok(1 << n_qubits)
}

fn check_operator(op: &Operator, targets: &[usize], n_qubits: usize) -> Result<()> {
    if op.n_qubits() != targets.len() {
        return Err(Error::DimensionMismatch {
            expected: targets.len(),
            actual: op.n_qubits(),
        });
    }
    kernel::check_targets(targets, n_qubits)
}

fn check_unitary(u: &Operator) -> Result<()> {
    if u.kind() == OperatorKind::Unitary || u.is_unitary() {
        Ok(())
    } else {
        Err(Error::NotUnitary)
    }
}

/// A normalized state vector of up to [`MAX_QUBITS`] qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = check_register(n_qubits)?;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: amplitudes.len(),
            });
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > STRUCTURAL_TOL {
            return Err(Error::InvalidState(format!("norm {norm} is not 1")));
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Normalizes `amplitudes` before building the state.
    pub fn normalized(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Self::new(n_qubits, amplitudes.into_iter().map(|a| a / norm).collect())
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = check_register(n_qubits)?;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: index,
            });
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    fn qubit(a: Complex64, b: Complex64) -> Self {
        Self {
            n_qubits: 1,
            amplitudes: vec![a, b],
        }
    }

    /// Horizontal polarization, basis vector 0.
    pub fn h() -> Self {
        Self::qubit(ONE, ZERO)
    }

    /// Vertical polarization, basis vector 1.
    pub fn v() -> Self {
        Self::qubit(ZERO, ONE)
    }

    pub fn plus() -> Self {
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self::qubit(s, s)
    }

    pub fn minus() -> Self {
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self::qubit(s, -s)
    }

    /// `(|H> + i|V>)/sqrt 2`.
    pub fn left() -> Self {
        Self::qubit(
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::new(0.0, FRAC_1_SQRT_2),
        )
    }

    /// `(|H> - i|V>)/sqrt 2`.
    pub fn right() -> Self {
        Self::qubit(
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::new(0.0, -FRAC_1_SQRT_2),
        )
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                actual: other.n_qubits,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Kronecker product; `self` keeps the low-order qubit indices.
    pub fn tensor(&self, other: &PureState) -> Result<Self> {
        let n = self.n_qubits + other.n_qubits;
        if n > MAX_QUBITS {
            return Err(Error::Capacity(n));
        }
        Ok(Self {
            n_qubits: n,
            amplitudes: kernel::kron_vec(&self.amplitudes, &other.amplitudes),
        })
    }

    fn apply_raw(&self, op: &Operator, targets: &[usize]) -> Vec<Complex64> {
        let mut amps = self.amplitudes.clone();
        kernel::apply_strided(&mut amps, self.n_qubits, op.entries(), targets, 0, 1);
        amps
    }
}

impl QuantumState for PureState {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn apply_unitary(&self, u: &Operator, targets: &[usize]) -> Result<Self> {
        check_operator(u, targets, self.n_qubits)?;
        check_unitary(u)?;
        Ok(Self {
            n_qubits: self.n_qubits,
            amplitudes: self.apply_raw(u, targets),
        })
    }

    fn probability(&self, p: &Operator, targets: &[usize]) -> Result<f64> {
        check_operator(p, targets, self.n_qubits)?;
        Ok(self.apply_raw(p, targets).iter().map(|a| a.norm_sqr()).sum())
    }

    fn project(&self, p: &Operator, targets: &[usize]) -> Result<(Self, f64)> {
        check_operator(p, targets, self.n_qubits)?;
        let amps = self.apply_raw(p, targets);
        let prob: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if prob <= 0.0 {
            return Err(Error::ZeroProbability);
        }
        let scale = prob.sqrt();
        Ok((
            Self {
                n_qubits: self.n_qubits,
                amplitudes: amps.into_iter().map(|a| a / scale).collect(),
            },
            prob,
        ))
    }

    fn to_density(&self) -> DensityMatrix {
        let dim = self.dim();
        let mut entries = vec![ZERO; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                entries[i * dim + j] = self.amplitudes[i] * self.amplitudes[j].conj();
            }
        }
        DensityMatrix::trusted(self.n_qubits, entries)
    }
}

/// A density matrix of up to [`MAX_QUBITS`] qubits, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    /// Builds a density matrix and checks Hermiticity, unit trace and
    /// positivity within 1e-9.
    pub fn new(n_qubits: usize, entries: Vec<Complex64>) -> Result<Self> {
        let dim = check_register(n_qubits)?;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        let rho = Self { n_qubits, entries };
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn trusted(n_qubits: usize, entries: Vec<Complex64>) -> Self {
        Self { n_qubits, entries }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        let dim = check_register(n_qubits)?;
        let mut entries = kernel::identity(dim);
        let w = 1.0 / dim as f64;
        entries.iter_mut().for_each(|e| *e *= w);
        Ok(Self { n_qubits, entries })
    }

    /// Convex combination `sum_k w_k rho_k`. Weights must be nonnegative and
    /// sum to one.
    pub fn mixture(terms: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidState("empty mixture".into()))?
            .1;
        let total: f64 = terms.iter().map(|(w, _)| w).sum();
        if terms.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > STRUCTURAL_TOL {
            return Err(Error::InvalidState(format!(
                "mixture weights must be nonnegative and sum to 1, got {total}"
            )));
        }
        let mut entries = vec![ZERO; first.entries.len()];
        for (w, rho) in terms {
            if rho.n_qubits != first.n_qubits {
                return Err(Error::DimensionMismatch {
                    expected: first.n_qubits,
                    actual: rho.n_qubits,
                });
            }
            for (e, x) in entries.iter_mut().zip(&rho.entries) {
                *e += x * *w;
            }
        }
        Ok(Self::trusted(first.n_qubits, entries))
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim() + col]
    }

    pub fn trace(&self) -> Complex64 {
        kernel::trace(&self.entries, self.dim())
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        // Tr(rho rho) = sum_ij |rho_ij|^2 for Hermitian rho
        self.entries.iter().map(|e| e.norm_sqr()).sum()
    }

    pub fn is_hermitian(&self) -> bool {
        kernel::is_hermitian(&self.entries, self.dim(), STRUCTURAL_TOL)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let dim = self.dim();
        let m = DMatrix::from_row_slice(dim, dim, &self.entries);
        let hermitian = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        hermitian
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.is_hermitian() {
            return Err(Error::InvalidState("density matrix is not Hermitian".into()));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > STRUCTURAL_TOL || tr.im.abs() > STRUCTURAL_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min = self.min_eigenvalue();
        if min < -STRUCTURAL_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min}"
            )));
        }
        Ok(())
    }

    /// Kronecker product; `self` keeps the low-order qubit indices.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        let n = self.n_qubits + other.n_qubits;
        if n > MAX_QUBITS {
            return Err(Error::Capacity(n));
        }
        Ok(Self::trusted(
            n,
            kernel::kron_mat(&self.entries, self.dim(), &other.entries, other.dim()),
        ))
    }

    /// Reduced state on `keep`; output qubit `j` is input qubit `keep[j]`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::EmptyKeep);
        }
        kernel::check_targets(keep, self.n_qubits)?;
        let traced = kernel::complement(keep, self.n_qubits);
        let dim = self.dim();
        let out_dim = 1usize << keep.len();
        let mut out = vec![ZERO; out_dim * out_dim];
        let kept_idx: Vec<usize> = (0..out_dim).map(|a| kernel::scatter(a, keep)).collect();
        for t in 0..(1usize << traced.len()) {
            let base = kernel::scatter(t, &traced);
            for a in 0..out_dim {
                let row = (base | kept_idx[a]) * dim;
                for b in 0..out_dim {
                    out[a * out_dim + b] += self.entries[row + (base | kept_idx[b])];
                }
            }
        }
        Ok(Self::trusted(keep.len(), out))
    }

    /// Largest elementwise deviation from `other`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        if self.n_qubits != other.n_qubits {
            return f64::INFINITY;
        }
        kernel::max_abs_diff(&self.entries, &other.entries)
    }

    fn conjugated(&self, op: &Operator, targets: &[usize]) -> Vec<Complex64> {
        let mut entries = self.entries.clone();
        kernel::conjugate_density(&mut entries, self.n_qubits, op.entries(), targets);
        entries
    }
}

impl QuantumState for DensityMatrix {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn apply_unitary(&self, u: &Operator, targets: &[usize]) -> Result<Self> {
        check_operator(u, targets, self.n_qubits)?;
        check_unitary(u)?;
        Ok(Self::trusted(self.n_qubits, self.conjugated(u, targets)))
    }

    fn probability(&self, p: &Operator, targets: &[usize]) -> Result<f64> {
        check_operator(p, targets, self.n_qubits)?;
        let mut left = self.entries.clone();
        let dim = self.dim();
        for col in 0..dim {
            kernel::apply_strided(&mut left, self.n_qubits, p.entries(), targets, col, dim);
        }
        Ok(kernel::trace(&left, dim).re)
    }

    fn project(&self, p: &Operator, targets: &[usize]) -> Result<(Self, f64)> {
        check_operator(p, targets, self.n_qubits)?;
        let mut entries = self.conjugated(p, targets);
        let prob = kernel::trace(&entries, self.dim()).re;
        if prob <= 0.0 {
            return Err(Error::ZeroProbability);
        }
        entries.iter_mut().for_each(|e| *e /= prob);
        Ok((Self::trusted(self.n_qubits, entries), prob))
    }

    fn to_density(&self) -> DensityMatrix {
        self.clone()
    }
}
