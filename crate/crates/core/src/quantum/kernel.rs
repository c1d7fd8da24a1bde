//! Index-level kernels shared by state vectors and density matrices.
//!
//! Qubit 0 is the least significant bit of a basis index. A `k`-qubit matrix
//! acting on `targets` treats `targets[j]` as its own qubit `j`.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub(crate) fn check_targets(targets: &[usize], n_qubits: usize) -> Result<()> {
    for (pos, &t) in targets.iter().enumerate() {
        if t >= n_qubits {
            return Err(Error::QubitOutOfRange {
                index: t,
                n_qubits,
            });
        }
        if targets[..pos].contains(&t) {
            return Err(Error::DuplicateTarget(t));
        }
    }
    Ok(())
}

/// Spreads the low bits of `value` onto the bit positions listed in `positions`.
#[inline]
pub(crate) fn scatter(value: usize, positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &p)| acc | (((value >> j) & 1) << p))
}

/// Qubits of an `n_qubits` register not listed in `targets`, ascending.
pub(crate) fn complement(targets: &[usize], n_qubits: usize) -> Vec<usize> {
    (0..n_qubits).filter(|q| !targets.contains(q)).collect()
}

/// Applies `matrix` (row-major, `2^k x 2^k`) to the logical vector stored at
/// `data[offset + i * stride]` for `i` in `0..2^n_qubits`.
pub(crate) fn apply_strided(
    data: &mut [Complex64],
    n_qubits: usize,
    matrix: &[Complex64],
    targets: &[usize],
    offset: usize,
    stride: usize,
) {
    let k = targets.len();
    let dim = 1usize << n_qubits;
    match *targets {
        [t] => {
            let bit = 1usize << t;
            let (m00, m01, m10, m11) = (matrix[0], matrix[1], matrix[2], matrix[3]);
            for i in (0..dim).filter(|i| i & bit == 0) {
                let a = offset + i * stride;
                let b = offset + (i | bit) * stride;
                let (x, y) = (data[a], data[b]);
                data[a] = m00 * x + m01 * y;
                data[b] = m10 * x + m11 * y;
            }
            return;
        }
        [t0, t1] => {
            let (b0, b1) = (1usize << t0, 1usize << t1);
            for i in (0..dim).filter(|i| i & (b0 | b1) == 0) {
                let idx = [
                    offset + i * stride,
                    offset + (i | b0) * stride,
                    offset + (i | b1) * stride,
                    offset + (i | b0 | b1) * stride,
                ];
                let v = [data[idx[0]], data[idx[1]], data[idx[2]], data[idx[3]]];
                for (row, &out) in idx.iter().enumerate() {
                    let m = &matrix[row * 4..row * 4 + 4];
                    data[out] = m[0] * v[0] + m[1] * v[1] + m[2] * v[2] + m[3] * v[3];
                }
            }
            return;
        }
        _ => {}
    }
    let sub = 1usize << k;
    let rest = complement(targets, n_qubits);
    let offsets: Vec<usize> = (0..sub).map(|s| scatter(s, targets)).collect();
    let mut gathered = vec![ZERO; sub];
    for r in 0..(1usize << rest.len()) {
        let base = scatter(r, &rest);
        for (s, g) in gathered.iter_mut().enumerate() {
            *g = data[offset + (base | offsets[s]) * stride];
        }
        for (row, &off) in offsets.iter().enumerate() {
            let coeffs = &matrix[row * sub..(row + 1) * sub];
            let value = coeffs
                .iter()
                .zip(&gathered)
                .fold(ZERO, |acc, (m, g)| acc + m * g);
            data[offset + (base | off) * stride] = value;
        }
    }
}

/// `rho <- M rho M^dagger` with `M` embedded on `targets`.
pub(crate) fn conjugate_density(
    data: &mut [Complex64],
    n_qubits: usize,
    matrix: &[Complex64],
    targets: &[usize],
) {
    let dim = 1usize << n_qubits;
    for col in 0..dim {
        apply_strided(data, n_qubits, matrix, targets, col, dim);
    }
    let conj: Vec<Complex64> = matrix.iter().map(|z| z.conj()).collect();
    for row in 0..dim {
        apply_strided(data, n_qubits, &conj, targets, row * dim, 1);
    }
}

/// Kronecker product with `a` occupying the low-order qubits.
pub(crate) fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for y in b {
        for x in a {
            out.push(x * y);
        }
    }
    out
}

/// Kronecker product of square row-major matrices, `a` on the low-order qubits.
pub(crate) fn kron_mat(a: &[Complex64], da: usize, b: &[Complex64], db: usize) -> Vec<Complex64> {
    let d = da * db;
    let mut out = vec![ZERO; d * d];
    for bi in 0..db {
        for bj in 0..db {
            let bv = b[bi * db + bj];
            if bv == ZERO {
                continue;
            }
            for ai in 0..da {
                for aj in 0..da {
                    let i = ai + bi * da;
                    let j = aj + bj * da;
                    out[i * d + j] = a[ai * da + aj] * bv;
                }
            }
        }
    }
    out
}

pub(crate) fn matmul(a: &[Complex64], b: &[Complex64], dim: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            let aik = a[i * dim + k];
            if aik == ZERO {
                continue;
            }
            for j in 0..dim {
                out[i * dim + j] += aik * b[k * dim + j];
            }
        }
    }
    out
}

pub(crate) fn adjoint(a: &[Complex64], dim: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            out[j * dim + i] = a[i * dim + j].conj();
        }
    }
    out
}

pub(crate) fn identity(dim: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; dim * dim];
    for i in 0..dim {
        out[i * dim + i] = ONE;
    }
    out
}

pub(crate) fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub(crate) fn is_hermitian(a: &[Complex64], dim: usize, tol: f64) -> bool {
    (0..dim).all(|i| (i..dim).all(|j| (a[i * dim + j] - a[j * dim + i].conj()).norm() <= tol))
}

pub(crate) fn trace(a: &[Complex64], dim: usize) -> Complex64 {
    (0..dim).map(|i| a[i * dim + i]).sum()
}
