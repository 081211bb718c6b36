// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra used by every analysis in the crate.
//!
//! Everything operates on [`CMatrix`], a square, finite, dense complex
//! matrix backed by `nalgebra`. Factorizations that `nalgebra` already
//! provides (QR iteration for the Schur form, SVD, Hermitian eigensolver,
//! LU) are used directly; the ordering swaps, matrix exponential,
//! Lyapunov/Stein solvers and the unit-triangular machinery live here.

mod expm;
mod lyapunov;
mod schur;
mod unit_tri;

use std::ops::Deref;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};

pub use expm::expm;
pub use lyapunov::{solve_lyapunov_continuous, solve_stein_discrete};
pub use schur::{schur, Ordering, SchurForm};
pub use unit_tri::{
    inverse_within_bound, unit_tri_bound, unit_tri_inverse_factored, RankOneFactor, UnitTriFactorization,
};

pub type C64 = Complex64;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Square dense complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix(DMatrix<C64>);

impl CMatrix {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        if m.nrows() == 0 {
            return Err(Error::Empty);
        }
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let v = m[(i, j)];
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(CMatrix(m))
    }

    /// Wraps a matrix produced by arithmetic on existing `CMatrix` values.
    pub(crate) fn from_raw(m: DMatrix<C64>) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        CMatrix(m)
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        for r in rows {
            if r.len() != n {
                return Err(Error::NotSquare { rows: n, cols: r.len() });
            }
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|&x| re(x)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn identity(n: usize) -> Self {
        CMatrix(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        CMatrix(DMatrix::zeros(n, n))
    }

    pub fn diag(values: &[C64]) -> Self {
        let n = values.len();
        CMatrix(DMatrix::from_fn(n, n, |i, j| if i == j { values[i] } else { C64::new(0.0, 0.0) }))
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let v: Vec<C64> = values.iter().map(|&x| re(x)).collect();
        Self::diag(&v)
    }

    /// Jordan block `lambda * I + N` of size `k`, ones on the superdiagonal.
    pub fn jordan(lambda: C64, k: usize) -> Self {
        CMatrix(DMatrix::from_fn(k, k, |i, j| {
            if i == j {
                lambda
            } else if j == i + 1 {
                re(1.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    /// Block diagonal direct sum.
    pub fn direct_sum(blocks: &[CMatrix]) -> Self {
        let n: usize = blocks.iter().map(|b| b.n()).sum();
        let mut m = DMatrix::zeros(n, n);
        let mut off = 0;
        for b in blocks {
            let k = b.n();
            m.view_mut((off, off), (k, k)).copy_from(&b.0);
            off += k;
        }
        CMatrix(m)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix(self.0.adjoint())
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        CMatrix(&self.0 * s)
    }

    /// `self - z I`.
    pub fn shift(&self, z: C64) -> CMatrix {
        let mut m = self.0.clone();
        for i in 0..m.nrows() {
            m[(i, i)] -= z;
        }
        CMatrix(m)
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        CMatrix(&self.0 * &other.0)
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        CMatrix(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        CMatrix(&self.0 - &other.0)
    }

    pub fn inverse(&self) -> Result<CMatrix> {
        self.0
            .clone()
            .lu()
            .try_inverse()
            .map(CMatrix)
            .ok_or_else(|| Error::Factorization("singular matrix in LU inverse".into()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius(&self.0)
    }

    pub fn is_upper_triangular(&self, tol: f64) -> bool {
        let n = self.n();
        (0..n).all(|j| ((j + 1)..n).all(|i| self.0[(i, j)].norm() <= tol))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.n();
        (0..n).all(|i| (0..n).all(|j| (self.0[(i, j)] - self.0[(j, i)].conj()).norm() <= tol))
    }
}

impl Deref for CMatrix {
    type Target = DMatrix<C64>;
    fn deref(&self) -> &DMatrix<C64> {
        &self.0
    }
}

impl TryFrom<DMatrix<C64>> for CMatrix {
    type Error = Error;
    fn try_from(m: DMatrix<C64>) -> Result<Self> {
        CMatrix::new(m)
    }
}

/// Serialized row by row, each entry as `[re, im]`.
impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.n();
        let mut seq = serializer.serialize_seq(Some(n))?;
        for i in 0..n {
            let row: Vec<[f64; 2]> = (0..n).map(|j| [self.0[(i, j)].re, self.0[(i, j)].im]).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

pub(crate) fn frobenius(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest singular value.
pub fn spectral_norm(a: &CMatrix) -> f64 {
    dmatrix_spectral_norm(a.as_dmatrix())
}

pub(crate) fn dmatrix_spectral_norm(a: &DMatrix<C64>) -> f64 {
    if a.iter().all(|v| *v == C64::new(0.0, 0.0)) {
        return 0.0;
    }
    if a.nrows() == 1 && a.ncols() == 1 {
        return a[(0, 0)].norm();
    }
    a.clone().singular_values().max()
}

/// Singular values in descending order.
pub(crate) fn singular_values_desc(a: &DMatrix<C64>) -> Vec<f64> {
    let mut s: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(h: &CMatrix) -> Vec<f64> {
    let sym = (h.as_dmatrix() + h.as_dmatrix().adjoint()) * re(0.5);
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Inverse of an upper triangular matrix by back substitution.
///
/// Returns `None` when a diagonal entry is exactly zero.
pub(crate) fn upper_triangular_inverse(t: &DMatrix<C64>) -> Option<DMatrix<C64>> {
    let n = t.nrows();
    let zero = C64::new(0.0, 0.0);
    let mut x = DMatrix::from_element(n, n, zero);
    for j in 0..n {
        let d = t[(j, j)];
        if d == zero {
            return None;
        }
        x[(j, j)] = d.inv();
        for i in (0..j).rev() {
            let mut s = zero;
            for k in (i + 1)..=j {
                s += t[(i, k)] * x[(k, j)];
            }
            let dii = t[(i, i)];
            if dii == zero {
                return None;
            }
            x[(i, j)] = -s / dii;
        }
    }
    Some(x)
}
