// SPDX-License-Identifier: Apache-2.0

//! Complex Schur decomposition with unitary diagonal reordering.
//!
//! Householder reduction to Hessenberg form, then implicit single-shift QR
//! with Wilkinson shifts. Reordering bubbles adjacent diagonal entries with
//! 2x2 Givens swaps, the same scheme LAPACK's `ztrexc` uses.

use nalgebra::DMatrix;
use serde::Serialize;

use super::{dmatrix_spectral_norm, frobenius, CMatrix, C64};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ordering {
    None,
    DescendingRealPart,
    DescendingModulus,
}

/// `A = Q T Q*` with `Q` unitary and `T` upper triangular.
#[derive(Debug, Clone)]
pub struct SchurForm {
    pub q: CMatrix,
    pub t: CMatrix,
    pub ordering: Ordering,
}

impl SchurForm {
    pub fn eigenvalues(&self) -> Vec<C64> {
        (0..self.t.n()).map(|i| self.t[(i, i)]).collect()
    }

    /// `‖Q T Q* − A‖ / ‖A‖` (absolute when `A = 0`).
    pub fn reconstruction_error(&self, a: &CMatrix) -> f64 {
        let r = self.q.matmul(&self.t).matmul(&self.q.adjoint());
        let err = dmatrix_spectral_norm(&(r.as_dmatrix() - a.as_dmatrix()));
        let na = dmatrix_spectral_norm(a.as_dmatrix());
        if na > 0.0 {
            err / na
        } else {
            err
        }
    }
}

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

pub fn schur(a: &CMatrix, ordering: Ordering) -> Result<SchurForm> {
    let n = a.n();
    let mut h = a.as_dmatrix().clone();
    let mut z = DMatrix::<C64>::identity(n, n);

    hessenberg_reduce(&mut h, &mut z);
    hessenberg_qr(&mut h, &mut z)?;

    // QR leaves exact zeros below the subdiagonal; clear rounding residue on it.
    for j in 0..n {
        for i in (j + 1)..n {
            h[(i, j)] = C64::new(0.0, 0.0);
        }
    }

    let norm = dmatrix_spectral_norm(a.as_dmatrix());
    reorder(&mut h, &mut z, ordering, 1e-12 * norm);

    Ok(SchurForm { q: CMatrix::from_raw(z), t: CMatrix::from_raw(h), ordering })
}

fn hessenberg_reduce(h: &mut DMatrix<C64>, z: &mut DMatrix<C64>) {
    let n = h.nrows();
    if n < 3 {
        return;
    }
    for k in 0..(n - 2) {
        let x: Vec<C64> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        let tail: f64 = x[1..].iter().map(|v| v.norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let alpha_norm = (x[0].norm_sqr() + tail).sqrt();
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { C64::new(1.0, 0.0) };
        // v = x + phase·‖x‖·e1, reflector P = I − 2 v v* / (v* v)
        let mut v = x;
        v[0] += phase * alpha_norm;
        let vnorm2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;

        // H ← P H (rows k+1..n)
        for j in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for (idx, vi) in v.iter().enumerate() {
                s += vi.conj() * h[(k + 1 + idx, j)];
            }
            s *= beta;
            for (idx, vi) in v.iter().enumerate() {
                h[(k + 1 + idx, j)] -= vi * s;
            }
        }
        // H ← H P, Z ← Z P (columns k+1..n)
        for m in [&mut *h, &mut *z] {
            for i in 0..n {
                let mut s = C64::new(0.0, 0.0);
                for (idx, vi) in v.iter().enumerate() {
                    s += m[(i, k + 1 + idx)] * vi;
                }
                s *= beta;
                for (idx, vi) in v.iter().enumerate() {
                    m[(i, k + 1 + idx)] -= s * vi.conj();
                }
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
}

/// Rotation `G = [[c, s], [-conj(s), c]]` with `G [x; y] = [r; 0]`.
#[inline]
pub(crate) fn givens(x: C64, y: C64) -> (f64, C64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let r = ax.hypot(ay);
    (ax / r, (x / ax) * y.conj() / r)
}

#[inline]
fn rotate_rows(m: &mut DMatrix<C64>, k: usize, c: f64, s: C64, cols: std::ops::Range<usize>) {
    for j in cols {
        let a = m[(k, j)];
        let b = m[(k + 1, j)];
        m[(k, j)] = a * c + s * b;
        m[(k + 1, j)] = -s.conj() * a + b * c;
    }
}

/// Right multiplication by `G*` on columns `k, k+1`.
#[inline]
fn rotate_cols(m: &mut DMatrix<C64>, k: usize, c: f64, s: C64, rows: std::ops::Range<usize>) {
    for i in rows {
        let p = m[(i, k)];
        let q = m[(i, k + 1)];
        m[(i, k)] = p * c + q * s.conj();
        m[(i, k + 1)] = -p * s + q * c;
    }
}

fn hessenberg_qr(h: &mut DMatrix<C64>, z: &mut DMatrix<C64>) -> Result<()> {
    let n = h.nrows();
    if n == 1 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let scale = frobenius(h).max(f64::MIN_POSITIVE);
    let mut hi = n - 1;
    let mut iter_since_deflation = 0usize;
    let mut total_iter = 0usize;
    let max_total = MAX_SWEEPS_PER_EIGENVALUE * n;

    loop {
        // Find the start of the unreduced block ending at `hi`.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut diag = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if diag == 0.0 {
                diag = scale;
            }
            if sub <= eps * diag {
                h[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            if hi == 0 {
                return Ok(());
            }
            hi -= 1;
            iter_since_deflation = 0;
            continue;
        }

        total_iter += 1;
        iter_since_deflation += 1;
        if total_iter > max_total {
            return Err(Error::Factorization(format!("Schur QR iteration did not converge after {total_iter} sweeps")));
        }

        let shift = if iter_since_deflation.is_multiple_of(11) {
            // exceptional shift to break cycles
            h[(hi, hi)] + 0.75 * h[(hi, hi - 1)].re.abs() + C64::new(0.0, h[(hi, hi - 1)].norm() * 0.5)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        // Implicit single-shift QR sweep on rows/cols lo..=hi.
        let mut x = h[(lo, lo)] - shift;
        let mut y = h[(lo + 1, lo)];
        for k in lo..hi {
            if k > lo {
                x = h[(k, k - 1)];
                y = h[(k + 1, k - 1)];
            }
            let (c, s) = givens(x, y);
            let col_start = if k > lo { k - 1 } else { lo };
            rotate_rows(h, k, c, s, col_start..n);
            let row_end = (k + 3).min(hi + 1);
            rotate_cols(h, k, c, s, 0..row_end);
            rotate_cols(z, k, c, s, 0..n);
            if k > lo {
                h[(k + 1, k - 1)] = C64::new(0.0, 0.0);
            }
        }
    }
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let l1 = mid + disc;
    let l2 = mid - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// `true` when `x` must sit strictly before `y` under `ordering`.
fn precedes(x: C64, y: C64, ordering: Ordering, tie: f64) -> bool {
    let (kx, ky) = match ordering {
        Ordering::None => return false,
        Ordering::DescendingRealPart => (x.re, y.re),
        Ordering::DescendingModulus => (x.norm(), y.norm()),
    };
    if (kx - ky).abs() > tie {
        kx > ky
    } else {
        x.im < y.im - tie
    }
}

/// Swap diagonal entries `k` and `k+1` of the upper triangular `t`.
pub(crate) fn swap_adjacent(t: &mut DMatrix<C64>, q: &mut DMatrix<C64>, k: usize) {
    let n = t.nrows();
    let t11 = t[(k, k)];
    let t22 = t[(k + 1, k + 1)];
    let t12 = t[(k, k + 1)];
    if t11 == t22 {
        return;
    }
    // Rotation mapping e1 onto the eigenvector (t12, t22 − t11) of t22.
    let (c, s) = givens(t12, t22 - t11);
    rotate_rows(t, k, c, s, k..n);
    rotate_cols(t, k, c, s, 0..(k + 2));
    rotate_cols(q, k, c, s, 0..n);
    t[(k, k)] = t22;
    t[(k + 1, k + 1)] = t11;
    t[(k + 1, k)] = C64::new(0.0, 0.0);
}

fn reorder(t: &mut DMatrix<C64>, q: &mut DMatrix<C64>, ordering: Ordering, tie: f64) {
    if ordering == Ordering::None {
        return;
    }
    let n = t.nrows();
    for pass in 0..n {
        let mut swapped = false;
        for k in 0..(n - 1).saturating_sub(pass) {
            if precedes(t[(k + 1, k + 1)], t[(k, k)], ordering, tie) {
                swap_adjacent(t, q, k);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
}
