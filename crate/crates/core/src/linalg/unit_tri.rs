// SPDX-License-Identifier: Apache-2.0

//! Unit upper triangular matrices as products of rank-one updates.
//!
//! Writing `U = A − I = [0, u_2, …, u_n]` column-wise,
//! `A = (I + u_n e_nᵀ)(I + u_{n−1} e_{n−1}ᵀ)…(I + u_2 e_2ᵀ)` because
//! `e_iᵀ u_j = 0` for `j ≤ i`, and each factor inverts to `I − u_j e_jᵀ`.
//! Hence `A⁻¹ = (I − u_2 e_2ᵀ)(I − u_3 e_3ᵀ)…(I − u_n e_nᵀ)`, and since each
//! factor has spectral norm at most `n ‖A‖`, `‖A⁻¹‖ ≤ (n ‖A‖)^{n−1}`.

use nalgebra::DMatrix;
use serde::Serialize;

use super::{spectral_norm, CMatrix, C64};
use crate::error::{Error, Result};

/// Diagonal entries must equal 1 and the strict lower part vanish to this
/// absolute tolerance.
const UNIT_TOL: f64 = 1e-12;

/// One factor `I − u e_jᵀ`; `column` is zero-based, `u` has zeros from row
/// `column` down.
#[derive(Debug, Clone, Serialize)]
pub struct RankOneFactor {
    pub column: usize,
    pub u: Vec<C64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct UnitTriFactorization {
    pub n: usize,
    /// In multiplication order, ascending column (zero-based).
    pub factors: Vec<RankOneFactor>,
}

impl UnitTriFactorization {
    /// Assembles the product of the factors.
    pub fn product(&self) -> CMatrix {
        let n = self.n;
        let mut x = DMatrix::<C64>::identity(n, n);
        for f in &self.factors {
            // X ← X (I − u e_jᵀ): column j of X loses X u
            let xu = &x * nalgebra::DVector::from_column_slice(&f.u);
            for i in 0..n {
                x[(i, f.column)] -= xu[i];
            }
        }
        CMatrix::from_raw(x)
    }
}

pub fn unit_tri_inverse_factored(a: &CMatrix) -> Result<(UnitTriFactorization, CMatrix)> {
    let n = a.n();
    for i in 0..n {
        for j in 0..n {
            let v = a[(i, j)];
            let bad = if i == j { (v - C64::new(1.0, 0.0)).norm() > UNIT_TOL } else { i > j && v.norm() > UNIT_TOL };
            if bad {
                return Err(Error::NotUnitTriangular { row: i, col: j, value: v });
            }
        }
    }

    // Columns with u_j = 0 contribute identity factors and are omitted.
    let factors = (1..n)
        .filter(|&j| (0..j).any(|i| a[(i, j)].norm() != 0.0))
        .map(|j| {
            let u = (0..n).map(|i| if i < j { a[(i, j)] } else { C64::new(0.0, 0.0) }).collect();
            RankOneFactor { column: j, u }
        })
        .collect();
    let f = UnitTriFactorization { n, factors };
    let inv = f.product();
    Ok((f, inv))
}

/// `(n·alpha)^{n−1}`, the inverse bound for unit triangular `A` with `‖A‖ ≤ alpha`.
pub fn unit_tri_bound(n: usize, alpha: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("dimension must be positive".into()));
    }
    if !(alpha >= 1.0) {
        return Err(Error::Domain(format!("alpha = {alpha} < 1 cannot bound a unit triangular matrix")));
    }
    Ok((n as f64 * alpha).powi(n as i32 - 1))
}

/// `‖A⁻¹‖ ≤ (n‖A‖)^{n−1}` evaluated on the assembled inverse.
pub fn inverse_within_bound(a: &CMatrix, inv: &CMatrix) -> bool {
    let n = a.n();
    let alpha = spectral_norm(a).max(1.0);
    spectral_norm(inv) <= (n as f64 * alpha).powi(n as i32 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius, re};

    #[test]
    fn identity_has_no_nontrivial_columns() {
        let (f, inv) = unit_tri_inverse_factored(&CMatrix::identity(1)).unwrap();
        assert!(f.factors.is_empty());
        assert_eq!(inv, CMatrix::identity(1));
        let (f, inv) = unit_tri_inverse_factored(&CMatrix::identity(3)).unwrap();
        assert!(f.factors.is_empty());
        assert_eq!(inv, CMatrix::identity(3));
    }

    #[test]
    fn two_by_two_closed_form() {
        let a = CMatrix::from_real_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        let (f, inv) = unit_tri_inverse_factored(&a).unwrap();
        assert_eq!(f.factors.len(), 1);
        assert_eq!(f.factors[0].column, 1);
        assert_eq!(f.factors[0].u, vec![re(2.0), re(0.0)]);
        let want = CMatrix::from_real_rows(&[vec![1.0, -2.0], vec![0.0, 1.0]]).unwrap();
        assert!(frobenius(inv.sub(&want).as_dmatrix()) == 0.0);
        assert!(inverse_within_bound(&a, &inv));
    }

    #[test]
    fn rejects_non_unit_diagonal() {
        let a = CMatrix::from_real_rows(&[vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(unit_tri_inverse_factored(&a), Err(Error::NotUnitTriangular { row: 0, col: 0, .. })));
        let a = CMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.5, 1.0]]).unwrap();
        assert!(unit_tri_inverse_factored(&a).is_err());
    }

    #[test]
    fn bound_values() {
        assert_eq!(unit_tri_bound(1, 5.0).unwrap(), 1.0);
        assert_eq!(unit_tri_bound(2, 2.0).unwrap(), 4.0);
        assert_eq!(unit_tri_bound(3, 3.0).unwrap(), 81.0);
        assert!(unit_tri_bound(3, 0.5).is_err());
        assert!(unit_tri_bound(3, f64::NAN).is_err());
    }
}
