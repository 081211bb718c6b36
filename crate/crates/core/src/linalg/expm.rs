// SPDX-License-Identifier: Apache-2.0

//! Matrix exponential by scaling and squaring with a degree-13 Padé
//! approximant (Higham 2005, the variant used by `scipy.linalg.expm`).

use nalgebra::DMatrix;

use super::{re, CMatrix, C64};
use crate::error::{Error, Result};

const THETA_13: f64 = 5.371920351148152;

const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Most squarings we accept before declaring the input unscalable.
const MAX_SQUARINGS: i32 = 1000;

fn one_norm(a: &DMatrix<C64>) -> f64 {
    (0..a.ncols()).map(|j| a.column(j).iter().map(|v| v.norm()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn expm(a: &CMatrix) -> Result<CMatrix> {
    let n = a.n();
    if n == 1 {
        let v = a[(0, 0)].exp();
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::Scaling(format!("exp({}) overflows", a[(0, 0)])));
        }
        return Ok(CMatrix::from_raw(DMatrix::from_element(1, 1, v)));
    }

    let norm = one_norm(a.as_dmatrix());
    let s = if norm > THETA_13 { (norm / THETA_13).log2().ceil() as i32 } else { 0 };
    if s > MAX_SQUARINGS {
        return Err(Error::Scaling(format!("1-norm {norm:e} needs {s} squarings")));
    }
    let a_s = a.as_dmatrix() * re(2f64.powi(-s));

    let id = DMatrix::<C64>::identity(n, n);
    let a2 = &a_s * &a_s;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = |i: usize| re(PADE_13[i]);

    let u_inner = &a6 * b(13) + &a4 * b(11) + &a2 * b(9);
    let u = &a_s * (&a6 * &u_inner + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &id * b(1));
    let v_inner = &a6 * b(12) + &a4 * b(10) + &a2 * b(8);
    let v = &a6 * &v_inner + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &id * b(0);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).ok_or_else(|| Error::Scaling("singular Padé denominator".into()))?;

    for _ in 0..s {
        r = &r * &r;
    }
    if r.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Scaling("result overflowed".into()));
    }
    Ok(CMatrix::from_raw(r))
}
