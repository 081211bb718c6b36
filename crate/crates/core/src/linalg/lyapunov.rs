// SPDX-License-Identifier: Apache-2.0

//! Lyapunov and Stein equations with identity right-hand side, solved
//! Bartels–Stewart style in the complex Schur basis.
//!
//! With `M = Q T Q*` and `X = Q* H Q` the equations become triangular:
//!
//! * continuous: `X T + T* X = −I`
//! * discrete:   `X − T* X T = I`

use nalgebra::DMatrix;

use super::{schur, spectral_norm, CMatrix, Ordering, C64};
use crate::error::{Error, Result};

/// Relative margin for the "strictly inside the stability region" checks.
pub const BOUNDARY_TOL: f64 = 1e-8;

/// Hermitian `H` with `H M + M* H = −I`.
pub fn solve_lyapunov_continuous(m: &CMatrix) -> Result<CMatrix> {
    let n = m.n();
    let margin = BOUNDARY_TOL * (1.0 + spectral_norm(m));
    let sf = schur(m, Ordering::None)?;
    let t = sf.t.as_dmatrix();
    if let Some(&lam) = sf.eigenvalues().iter().find(|l| l.re >= -margin) {
        return Err(Error::UnsolvableOnBoundary { eigenvalue: lam, margin });
    }

    let zero = C64::new(0.0, 0.0);
    let mut x = DMatrix::from_element(n, n, zero);
    for j in 0..n {
        for i in 0..n {
            let mut rhs = if i == j { C64::new(-1.0, 0.0) } else { zero };
            for k in 0..j {
                rhs -= x[(i, k)] * t[(k, j)];
            }
            for k in 0..i {
                rhs -= t[(k, i)].conj() * x[(k, j)];
            }
            x[(i, j)] = rhs / (t[(j, j)] + t[(i, i)].conj());
        }
    }
    Ok(back_transform(&sf.q, x))
}

/// Hermitian `H` with `H − M* H M = I`.
pub fn solve_stein_discrete(m: &CMatrix) -> Result<CMatrix> {
    let n = m.n();
    let margin = BOUNDARY_TOL * (1.0 + spectral_norm(m));
    let sf = schur(m, Ordering::None)?;
    let t = sf.t.as_dmatrix();
    if let Some(&lam) = sf.eigenvalues().iter().find(|l| l.norm() >= 1.0 - margin) {
        return Err(Error::UnsolvableOnBoundary { eigenvalue: lam, margin });
    }

    // (T* X T)_ij = Σ_{k≤i, l≤j} conj(t_ki) x_kl t_lj, filled row by row.
    let zero = C64::new(0.0, 0.0);
    let mut x = DMatrix::from_element(n, n, zero);
    // w[(k, j)] = Σ_{l≤j} x_kl t_lj for rows k already complete
    let mut w = DMatrix::from_element(n, n, zero);
    for i in 0..n {
        for j in 0..n {
            let mut acc = if i == j { C64::new(1.0, 0.0) } else { zero };
            for k in 0..i {
                acc += t[(k, i)].conj() * w[(k, j)];
            }
            let mut partial = zero;
            for l in 0..j {
                partial += x[(i, l)] * t[(l, j)];
            }
            acc += t[(i, i)].conj() * partial;
            x[(i, j)] = acc / (C64::new(1.0, 0.0) - t[(i, i)].conj() * t[(j, j)]);
        }
        for j in 0..n {
            let mut s = zero;
            for l in 0..=j {
                s += x[(i, l)] * t[(l, j)];
            }
            w[(i, j)] = s;
        }
    }
    Ok(back_transform(&sf.q, x))
}

/// `H = Q X Q*`, symmetrized.
fn back_transform(q: &CMatrix, x: DMatrix<C64>) -> CMatrix {
    let h = q.as_dmatrix() * x * q.as_dmatrix().adjoint();
    let sym = (&h + h.adjoint()) * C64::new(0.5, 0.0);
    CMatrix::from_raw(sym)
}
