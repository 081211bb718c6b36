// SPDX-License-Identifier: Apache-2.0

//! Constructive forms of the Kreiss conditions and the explicit bounds they
//! imply.
//!
//! Condition 3: a similarity `S` with `T = S M S⁻¹` upper triangular, the
//! diagonal ordered, and `|b_ij| ≤ K32 |Re b_ii|` (`K32 (1 − |b_ii|)` in
//! discrete mode). Here `S = D_ε⁻¹ Q*` from an ordered Schur form
//! `M = Q T₀ Q*` and `D_ε = diag(1, ε, ε², …)`, so `b_ij = t_ij ε^{j−i}`.
//!
//! Condition 4: Hermitian `H > 0` with `HM + M*H ≤ 0` (`M*HM ≤ H`).
//!
//! With `T = D + N` and `A = I − (zI − D)⁻¹ N` unit triangular with entries
//! bounded by `max(1, K32)`, `‖A‖ ≤ n max(1, K32)` and the unit-triangular
//! inverse bound give
//! `‖(zI − M)⁻¹‖ ≤ κ(S) (n² max(1, K32))^{n−1} max_λ |z − λ|⁻¹`
//! with `κ(S) ≤ K31² / 4`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigenvalues, schur, solve_lyapunov_continuous, solve_stein_discrete, spectral_norm, CMatrix, Ordering,
    C64,
};
use crate::resolvent::{Denominator, Resolvent};
use crate::serde_ext::f64_marked;
use crate::spectra::{boundary_excluded_spectrum, default_cluster_tol, spectrum, DEFAULT_TOL};
use crate::Mode;

/// Off-diagonal entries at most this times `1 + ‖M‖` count as zero in `K32`.
const ZERO_ENTRY: f64 = 1e-12;

/// Scalings always reported alongside the requested one.
pub const SCALING_SWEEP: [f64; 3] = [1.0, 1e-1, 1e-2];

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScalingPoint {
    pub eps: f64,
    pub k31: f64,
    #[serde(serialize_with = "f64_marked")]
    pub k32: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Condition3Certificate {
    pub mode: Mode,
    pub scaling_eps: f64,
    pub s: CMatrix,
    pub t: CMatrix,
    /// `‖S‖ + ‖S⁻¹‖`
    pub k31: f64,
    #[serde(serialize_with = "f64_marked")]
    pub k32: f64,
    /// `‖S‖ ‖S⁻¹‖`
    pub kappa_s: f64,
    pub ordering_valid: bool,
    pub triangular_valid: bool,
    pub diagonal_sign_valid: bool,
    /// `‖S M S⁻¹ − T‖`
    pub reconstruction_residual: f64,
    pub scaling_sweep: Vec<ScalingPoint>,
}

impl Condition3Certificate {
    pub fn n(&self) -> usize {
        self.t.n()
    }
}

/// Denominator of the `K32` entry bound for diagonal entry `b`.
fn k32_denominator(b: C64, mode: Mode) -> f64 {
    match mode {
        Mode::Continuous => b.re.abs(),
        Mode::Discrete => (1.0 - b.norm()).abs(),
    }
}

/// `max_{i<j} |b_ij| / den(b_ii)` with `0/0 → 0`, `x/0 → ∞`.
fn measure_k32(t: &DMatrix<C64>, mode: Mode, band: f64, zero: f64) -> f64 {
    let n = t.nrows();
    let mut k = 0.0f64;
    for i in 0..n {
        let den = k32_denominator(t[(i, i)], mode);
        for j in (i + 1)..n {
            let num = t[(i, j)].norm();
            if num <= zero {
                continue;
            }
            if den <= band {
                return f64::INFINITY;
            }
            k = k.max(num / den);
        }
    }
    k
}

fn ordering_for(mode: Mode) -> Ordering {
    match mode {
        Mode::Continuous => Ordering::DescendingRealPart,
        Mode::Discrete => Ordering::DescendingModulus,
    }
}

fn order_key(b: C64, mode: Mode) -> f64 {
    match mode {
        Mode::Continuous => b.re,
        Mode::Discrete => b.norm(),
    }
}

/// Smallest `key_i − key_{i+1}` along the diagonal; nonnegative when sorted.
fn ordering_slack(t: &DMatrix<C64>, mode: Mode) -> f64 {
    (1..t.nrows())
        .map(|i| order_key(t[(i - 1, i - 1)], mode) - order_key(t[(i, i)], mode))
        .fold(f64::INFINITY, f64::min)
}

/// Largest violation of `Re b_ii ≤ 0` (`|b_ii| ≤ 1`); nonpositive when valid.
fn sign_excess(t: &DMatrix<C64>, mode: Mode) -> f64 {
    (0..t.nrows())
        .map(|i| match mode {
            Mode::Continuous => t[(i, i)].re,
            Mode::Discrete => t[(i, i)].norm() - 1.0,
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn strict_lower_max(t: &DMatrix<C64>) -> f64 {
    let n = t.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in (j + 1)..n {
            worst = worst.max(t[(i, j)].norm());
        }
    }
    worst
}

/// `D⁻¹ T₀ D` and `S = D⁻¹ Q*` for `D = diag(ε^i)`.
fn scaled(q: &DMatrix<C64>, t0: &DMatrix<C64>, eps: f64) -> (DMatrix<C64>, DMatrix<C64>, DMatrix<C64>) {
    let n = t0.nrows();
    let t = DMatrix::from_fn(n, n, |i, j| t0[(i, j)] * eps.powi(j as i32 - i as i32));
    let qa = q.adjoint();
    let s = DMatrix::from_fn(n, n, |i, j| qa[(i, j)] * eps.powi(-(i as i32)));
    let s_inv = DMatrix::from_fn(n, n, |i, j| q[(i, j)] * eps.powi(j as i32));
    (t, s, s_inv)
}

pub fn build_condition3(m: &CMatrix, mode: Mode, scaling_eps: f64) -> Result<Condition3Certificate> {
    if !(scaling_eps > 0.0 && scaling_eps.is_finite()) {
        return Err(Error::Config(format!("scaling eps = {scaling_eps} must be positive")));
    }
    let norm = spectral_norm(m);
    let band = DEFAULT_TOL * (1.0 + norm);
    let zero = ZERO_ENTRY * (1.0 + norm);
    let sf = schur(m, ordering_for(mode))?;
    let (q, t0) = (sf.q.as_dmatrix(), sf.t.as_dmatrix());

    let measure = |eps: f64| {
        let (t, s, s_inv) = scaled(q, t0, eps);
        let ns = crate::linalg::dmatrix_spectral_norm(&s);
        let ni = crate::linalg::dmatrix_spectral_norm(&s_inv);
        (t, s, s_inv, ns, ni)
    };
    let scaling_sweep = SCALING_SWEEP
        .iter()
        .map(|&eps| {
            let (t, _, _, ns, ni) = measure(eps);
            ScalingPoint { eps, k31: ns + ni, k32: measure_k32(&t, mode, band, zero) }
        })
        .collect();

    let (t, s, s_inv, ns, ni) = measure(scaling_eps);
    let recon = &s * m.as_dmatrix() * &s_inv - &t;
    let tri = strict_lower_max(&t);
    let t_norm = crate::linalg::dmatrix_spectral_norm(&t);
    Ok(Condition3Certificate {
        mode,
        scaling_eps,
        k31: ns + ni,
        k32: measure_k32(&t, mode, band, zero),
        kappa_s: ns * ni,
        ordering_valid: ordering_slack(&t, mode) >= -1e-12 * (1.0 + norm),
        triangular_valid: tri <= 1e-10 * t_norm,
        diagonal_sign_valid: sign_excess(&t, mode) <= band,
        reconstruction_residual: crate::linalg::dmatrix_spectral_norm(&recon),
        s: CMatrix::from_raw(s),
        t: CMatrix::from_raw(t),
        scaling_sweep,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Nonnegative exactly when the check passes.
    pub slack: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Condition3Verification {
    pub checks: Vec<Check>,
    pub all_passed: bool,
}

impl Condition3Verification {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Recomputes every constraint from `S`, `T` and `M`; stored flags are ignored.
pub fn verify_condition3(
    m: &CMatrix,
    cert: &Condition3Certificate,
    k31_claim: f64,
    k32_claim: f64,
) -> Condition3Verification {
    let mode = cert.mode;
    let norm = spectral_norm(m);
    let band = DEFAULT_TOL * (1.0 + norm);
    let zero = ZERO_ENTRY * (1.0 + norm);
    let t = cert.t.as_dmatrix();
    let mut checks = Vec::new();
    let mut push = |name, slack: f64| checks.push(Check { name, passed: slack >= 0.0, slack });

    match cert.s.inverse() {
        Ok(s_inv) => {
            let ns = spectral_norm(&cert.s);
            let ni = spectral_norm(&s_inv);
            let recon = cert.s.matmul(m).matmul(&s_inv).sub(&cert.t);
            let tol = 1e-8 * (1.0 + norm) * ns * ni;
            push("similarity", tol - spectral_norm(&recon));
            push("k31", k31_claim * (1.0 + 1e-12) - (ns + ni));
        }
        Err(_) => {
            push("similarity", f64::NEG_INFINITY);
            push("k31", f64::NEG_INFINITY);
        }
    }
    let t_norm = spectral_norm(&cert.t);
    push("triangular", 1e-10 * t_norm - strict_lower_max(t));
    push("ordering", ordering_slack(t, mode) + 1e-12 * (1.0 + norm));
    push("diagonal-sign", band - sign_excess(t, mode));

    let n = t.nrows();
    let mut entry = f64::INFINITY;
    for i in 0..n {
        let den = k32_denominator(t[(i, i)], mode);
        let den = if den <= band { 0.0 } else { den };
        for j in (i + 1)..n {
            let num = t[(i, j)].norm();
            let allowed = if num <= zero {
                // 0/0 → 0: any nonnegative claim covers a zero entry
                if k32_claim >= 0.0 {
                    f64::INFINITY
                } else {
                    k32_claim * den.max(1.0)
                }
            } else if den == 0.0 {
                if k32_claim == f64::INFINITY {
                    f64::INFINITY
                } else {
                    -num
                }
            } else {
                k32_claim * den - num
            };
            entry = entry.min(allowed);
        }
    }
    push("entry-bound", entry);

    let all_passed = checks.iter().all(|c| c.passed);
    Condition3Verification { checks, all_passed }
}

#[derive(Debug, Clone, Serialize)]
pub struct Condition4Certificate {
    pub mode: Mode,
    pub h: CMatrix,
    pub k4: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// `λ_max(HM + M*H)` or `λ_max(M*HM − H)`.
    pub negativity_residual: f64,
    /// Factor applied to the raw solver output.
    pub normalization: f64,
    pub valid: bool,
}

/// `H` normalized so that `λ_max λ_min = 1`, making `K4 = √(λ_max / λ_min)`.
pub fn build_condition4(m: &CMatrix, mode: Mode) -> Result<Condition4Certificate> {
    let raw = match mode {
        Mode::Continuous => solve_lyapunov_continuous(m)?,
        Mode::Discrete => solve_stein_discrete(m)?,
    };
    let ev = hermitian_eigenvalues(&raw);
    let (lo, hi) = (ev[0], *ev.last().unwrap());
    let normalization = if lo > 0.0 { 1.0 / (lo * hi).sqrt() } else { 1.0 };
    let h = raw.scale(C64::new(normalization, 0.0));
    let ev = hermitian_eigenvalues(&h);
    let (lambda_min, lambda_max) = (ev[0], *ev.last().unwrap());
    let negativity_residual = negativity(m, &h, mode);
    let nm = spectral_norm(m);
    let valid = lambda_min > 0.0 && negativity_residual <= 1e-8 * spectral_norm(&h) * (1.0 + nm).powi(2);
    Ok(Condition4Certificate {
        mode,
        k4: lambda_max.max(1.0 / lambda_min),
        lambda_min,
        lambda_max,
        negativity_residual,
        normalization,
        valid,
        h,
    })
}

fn negativity(m: &CMatrix, h: &CMatrix, mode: Mode) -> f64 {
    let g = match mode {
        Mode::Continuous => h.matmul(m).add(&m.adjoint().matmul(h)),
        Mode::Discrete => m.adjoint().matmul(h).matmul(m).sub(h),
    };
    *hermitian_eigenvalues(&g).last().unwrap()
}

/// `C = (n² max(1, K32))^{n−1}`.
pub fn certificate_constant(n: usize, k32: f64) -> f64 {
    if k32 == f64::INFINITY {
        return f64::INFINITY;
    }
    ((n * n) as f64 * k32.max(1.0)).powi(n as i32 - 1)
}

/// `K31² C / 4`.
pub fn kreiss_bound(n: usize, k31: f64, k32: f64) -> f64 {
    k31 * k31 * certificate_constant(n, k32) / 4.0
}

/// `K31² C / 4 · (1 + 1/r)^{n−1}`.
pub fn region_bound(n: usize, k31: f64, k32: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("region parameter r = {r} must be positive")));
    }
    Ok(kreiss_bound(n, k31, k32) * (1.0 + 1.0 / r).powi(n as i32 - 1))
}

/// Upper bound on `𝒦(M)` from a continuous-mode certificate.
pub fn bound_from_condition3(cert: &Condition3Certificate) -> Result<f64> {
    if cert.mode != Mode::Continuous {
        return Err(Error::Domain("the half-plane bound needs a continuous-mode certificate".into()));
    }
    Ok(kreiss_bound(cert.n(), cert.k31, cert.k32))
}

/// Resolvent bound factor on `S(M,r)` (continuous) or `T(M,r)` (discrete).
pub fn miller_region_bound(cert: &Condition3Certificate, r: f64) -> Result<f64> {
    region_bound(cert.n(), cert.k31, cert.k32, r)
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub z: C64,
    pub resolvent_norm: f64,
    pub bound: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    #[serde(serialize_with = "f64_marked")]
    pub k: f64,
    pub denominator: Denominator,
    pub checked: usize,
    pub violations: Vec<Violation>,
    pub singular: Vec<C64>,
    /// `min (K·den − ‖R‖) / (K·den)` over checked samples.
    pub min_relative_slack: f64,
}

/// Checks `‖(zI − M)⁻¹‖ ≤ K max_λ |z − λ|⁻¹` on each sample; slack below
/// `−10⁻⁸` relative counts as a violation. An empty eigenvalue set makes
/// the bound vacuous.
pub fn check_resolvent_inequality(
    m: &CMatrix,
    k: f64,
    samples: &[C64],
    denominator: Denominator,
) -> Result<InequalityReport> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("K = {k} must be positive")));
    }
    let res = Resolvent::new(m)?;
    let lambdas = match denominator {
        Denominator::FullSpectrum => res.eigenvalues().to_vec(),
        Denominator::Excluded => boundary_excluded_spectrum(&spectrum(m, default_cluster_tol(m))?),
    };
    let mut report = InequalityReport {
        k,
        denominator,
        checked: 0,
        violations: Vec::new(),
        singular: Vec::new(),
        min_relative_slack: f64::INFINITY,
    };
    for &z in samples {
        let norm = match res.norm_at(z) {
            Ok(v) => v,
            Err(_) => {
                report.singular.push(z);
                continue;
            }
        };
        report.checked += 1;
        let dist = lambdas.iter().map(|l| (z - l).norm()).fold(f64::INFINITY, f64::min);
        if !dist.is_finite() {
            continue;
        }
        let bound = k / dist;
        let slack = bound - norm;
        let rel = slack / bound;
        report.min_relative_slack = report.min_relative_slack.min(rel);
        if rel < -1e-8 {
            report.violations.push(Violation { z, resolvent_norm: norm, bound, slack });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, re};

    #[test]
    fn diagonal_certificate() {
        let m = CMatrix::diag_real(&[-1.0, -2.0]);
        let cert = build_condition3(&m, Mode::Continuous, 1.0).unwrap();
        assert_eq!(cert.k32, 0.0);
        assert!((cert.k31 - 2.0).abs() < 1e-12);
        assert!(cert.ordering_valid && cert.triangular_valid && cert.diagonal_sign_valid);
        assert!(cert.kappa_s <= cert.k31 * cert.k31 / 4.0 + 1e-12);

        let v = verify_condition3(&m, &cert, 2.0 + 1e-12, 0.0);
        assert!(v.all_passed, "{v:?}");
        let v = verify_condition3(&m, &cert, 2.0 + 1e-12, -1.0);
        assert!(!v.check("entry-bound").unwrap().passed);
        assert!(v.check("similarity").unwrap().passed);
    }

    #[test]
    fn scaled_jordan_like_certificate() {
        let m = CMatrix::from_real_rows(&[vec![-1.0, 10.0], vec![0.0, -1.0]]).unwrap();
        let cert = build_condition3(&m, Mode::Continuous, 0.1).unwrap();
        assert!((cert.t[(0, 1)].norm() - 1.0).abs() < 1e-12);
        assert!((cert.k32 - 1.0).abs() < 1e-12);
        assert!((cert.k31 - 11.0).abs() < 1e-10);
        assert!(cert.reconstruction_residual < 1e-12);
        assert_eq!(cert.scaling_sweep.len(), 3);
        assert!((cert.scaling_sweep[0].k32 - 10.0).abs() < 1e-12);
    }

    #[test]
    fn defective_axis_has_infinite_k32() {
        let cert = build_condition3(&CMatrix::jordan(c(0.0, 1.0), 2), Mode::Continuous, 1.0).unwrap();
        assert_eq!(cert.k32, f64::INFINITY);
        assert_eq!(bound_from_condition3(&cert).unwrap(), f64::INFINITY);
    }

    #[test]
    fn shuffled_diagonal_fails_ordering() {
        let m = CMatrix::diag_real(&[-1.0, -2.0]);
        let mut cert = build_condition3(&m, Mode::Continuous, 1.0).unwrap();
        let p = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        cert.s = p.matmul(&cert.s);
        cert.t = CMatrix::diag_real(&[-2.0, -1.0]);
        let v = verify_condition3(&m, &cert, 2.0 + 1e-12, 0.0);
        assert!(v.check("similarity").unwrap().passed);
        assert!(!v.check("ordering").unwrap().passed);
        assert!(!v.all_passed);
    }

    #[test]
    fn condition4_examples() {
        let cert = build_condition4(&CMatrix::identity(2).scale(re(-1.0)), Mode::Continuous).unwrap();
        assert!((cert.k4 - 1.0).abs() < 1e-12 && cert.valid);

        let cert = build_condition4(&CMatrix::diag_real(&[-1.0, -2.0]), Mode::Continuous).unwrap();
        assert!((cert.k4 - 2f64.sqrt()).abs() < 1e-12);
        assert!(cert.valid && cert.negativity_residual < 0.0);

        assert!(matches!(
            build_condition4(&CMatrix::diag(&[c(0.0, 1.0)]), Mode::Continuous),
            Err(Error::UnsolvableOnBoundary { .. })
        ));

        let cert = build_condition4(&CMatrix::jordan(re(0.0), 2), Mode::Discrete).unwrap();
        assert!(cert.valid && cert.k4 >= 1.0);
    }

    #[test]
    fn bound_arithmetic() {
        assert_eq!(certificate_constant(2, 1.0), 4.0);
        assert_eq!(kreiss_bound(2, 2.0, 1.0), 4.0);
        assert_eq!(kreiss_bound(2, 2.0, 0.0), 4.0);
        assert_eq!(kreiss_bound(2, 2.0, f64::INFINITY), f64::INFINITY);
        assert_eq!(region_bound(2, 2.0, 1.0, 1.0).unwrap(), 8.0);
        let big_r = region_bound(3, 2.0, 1.0, 1e12).unwrap();
        assert!((big_r / kreiss_bound(3, 2.0, 1.0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn resolvent_inequality() {
        let m = CMatrix::diag(&[re(-1.0), c(0.0, 2.0)]);
        let zs: Vec<C64> = (1..40).map(|k| c(0.05 * k as f64, 0.3 * k as f64 - 6.0)).collect();
        let r = check_resolvent_inequality(&m, 1.0, &zs, Denominator::FullSpectrum).unwrap();
        assert!(r.violations.is_empty() && r.checked == zs.len());

        let j = CMatrix::jordan(re(-1.0), 2);
        let r = check_resolvent_inequality(&j, 0.5, &[re(1e-3)], Denominator::Excluded).unwrap();
        assert_eq!(r.violations.len(), 1);
    }
}
