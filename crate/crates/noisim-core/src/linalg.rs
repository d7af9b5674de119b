//! Small dense complex matrices.
//!
//! Everything in here is plain row-major `Vec<Complex64>` math. The matrices
//! are tiny (2x2 and 4x4 for gates and Kraus operators, up to 2^n x 2^n for
//! the dense oracles used in tests), so no external linear-algebra crate is
//! involved.

use num_complex::Complex64;

pub type C64 = Complex64;

pub const ZERO: C64 = Complex64::new(0.0, 0.0);
pub const ONE: C64 = Complex64::new(1.0, 0.0);

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub dim: usize,
    pub data: Vec<C64>,
}

impl CMat {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    /// Build from a nested row slice; panics if the rows are not square.
    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            assert_eq!(row.len(), dim, "matrix rows must be square");
            data.extend_from_slice(row);
        }
        Self { dim, data }
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.at(i, k);
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.at(k, j);
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> CMat {
        let n = self.dim;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, self.at(j, i).conj());
            }
        }
        out
    }

    /// Kronecker product; `self` supplies the most-significant index block.
    pub fn kron(&self, other: &CMat) -> CMat {
        let (a, b) = (self.dim, other.dim);
        let n = a * b;
        let mut out = CMat::zeros(n);
        for i in 0..a {
            for j in 0..a {
                let f = self.at(i, j);
                if f == ZERO {
                    continue;
                }
                for k in 0..b {
                    for l in 0..b {
                        out.set(i * b + k, j * b + l, f * other.at(k, l));
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, factor: C64) -> CMat {
        CMat {
            dim: self.dim,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!(self.dim, other.dim);
        CMat {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.at(i, i)).sum()
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Apply to a state vector: `out = M * v`.
    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        let n = self.dim;
        let mut out = vec![ZERO; n];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut acc = ZERO;
            for (j, value) in v.iter().enumerate() {
                acc += self.at(i, j) * value;
            }
            *slot = acc;
        }
        out
    }
}

/// `true` if `a = e^{i phi} b` for some real phi, entrywise within `tol`.
pub fn equal_up_to_global_phase(a: &CMat, b: &CMat, tol: f64) -> bool {
    if a.dim != b.dim {
        return false;
    }
    // Fix the phase on the largest entry of b, then compare entrywise.
    let (mut best, mut phase) = (0.0f64, ONE);
    for (x, y) in a.data.iter().zip(&b.data) {
        let m = y.norm();
        if m > best {
            best = m;
            phase = x / y;
        }
    }
    if best == 0.0 {
        return a.data.iter().all(|x| x.norm() <= tol);
    }
    let phase = phase / phase.norm();
    a.data
        .iter()
        .zip(&b.data)
        .all(|(x, y)| (x - y * phase).norm() <= tol)
}

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Only used for small validation checks (positive semidefiniteness of
/// density matrices up to a handful of qubits), so plain O(n^3) sweeps are
/// plenty.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let n = m.dim;
    let mut a = m.clone();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a.at(p, q).norm_sqr();
            }
        }
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let b = a.at(p, q);
                let g = b.norm();
                if g < 1e-30 {
                    continue;
                }
                // Annihilate the (p, q) entry with the unitary
                //   U = [[c, s], [-u* s, u* c]],  u = b / |b|,
                // where theta solves sin(2t)(app - aqq)/2 + g cos(2t) = 0.
                let u = b / g;
                let app = a.at(p, p).re;
                let aqq = a.at(q, q).re;
                let theta = 0.5 * (-2.0 * g).atan2(app - aqq);
                let (c, s) = (theta.cos(), theta.sin());
                // Columns: A <- A U.
                for i in 0..n {
                    let aip = a.at(i, p);
                    let aiq = a.at(i, q);
                    a.set(i, p, aip * c - aiq * u.conj() * s);
                    a.set(i, q, aip * s + aiq * u.conj() * c);
                }
                // Rows: A <- U^dag A.
                for j in 0..n {
                    let apj = a.at(p, j);
                    let aqj = a.at(q, j);
                    a.set(p, j, apj * c - aqj * u * s);
                    a.set(q, j, apj * s + aqj * u * c);
                }
            }
        }
    }
    (0..n).map(|i| a.at(i, i).re).collect()
}
