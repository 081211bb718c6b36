// SPDX-License-Identifier: Apache-2.0

//! Fourier–Laplace solution of `u' = A u + f`, `u(0) = 0`, for one symbol
//! matrix `A`, and the resolvent envelopes that bound its contour integrand.
//!
//! The contour integral `u(t) = (1/2π) ∫ e^{zt} (zI − A)⁻¹ f̃(z) dy` over
//! `z = γ + iy` is truncated symmetrically to `|y| ≤ y_max` and evaluated
//! with the trapezoid rule. Node values are computed in parallel; sums use a
//! fixed pairwise order, so results do not depend on the thread count.

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use crate::constants::{calk_continuous, kreiss_constant_continuous, Argmax, SearchConfig};
use crate::error::{Error, Result};
use crate::linalg::{expm, CMatrix, C64};
use crate::resolvent::{linspace, Resolvent};
use crate::serde_ext::opt_f64_marked;

/// Gap between the spectral abscissa and the auto-filled `α`.
pub const ALPHA_MARGIN: f64 = 1e-2;
/// Relative tolerance of the pointwise envelope check.
pub const ENVELOPE_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct CauchyConfig {
    /// Contour abscissa; must exceed the spectral abscissa of `A`.
    pub gamma: f64,
    /// Shift in `K/(Re z − α)`; auto-filled when `None`.
    pub alpha: Option<f64>,
    pub k_old: Option<f64>,
    pub k_new: Option<f64>,
    pub y_max: f64,
    pub y_count: usize,
    pub t_eval: Vec<f64>,
}

impl Default for CauchyConfig {
    fn default() -> Self {
        CauchyConfig {
            gamma: 1.0,
            alpha: None,
            k_old: None,
            k_new: None,
            y_max: 200.0,
            y_count: 200_000,
            t_eval: vec![1.0],
        }
    }
}

impl CauchyConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.gamma.is_finite() {
            return Err(Error::Config("γ must be finite".into()));
        }
        if let Some(a) = self.alpha {
            if !(self.gamma > a) {
                return Err(Error::Config(format!("γ = {} must exceed α = {a}", self.gamma)));
            }
        }
        for k in [self.k_old, self.k_new].into_iter().flatten() {
            if !(k > 0.0) {
                return Err(Error::Config("bound constants must be positive".into()));
            }
        }
        if !(self.y_max > 0.0 && self.y_max.is_finite()) {
            return Err(Error::Config("y_max must be positive".into()));
        }
        if self.y_count < 2 {
            return Err(Error::Config("y_count must be at least 2".into()));
        }
        if self.t_eval.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(Error::Config("evaluation times must be nonnegative".into()));
        }
        Ok(())
    }

    fn step(&self) -> f64 {
        2.0 * self.y_max / (self.y_count - 1) as f64
    }
}

/// Time profile of a forcing `f(t) = φ(t) c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Profile {
    /// `φ ≡ 1`
    Constant,
    /// `φ(t) = e^{−rate·t}`
    ExponentialDecay { rate: f64 },
    /// `φ(t) = exp(−(t − center)² / (2 width²))`
    GaussianPulse { center: f64, width: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct Forcing {
    pub profile: Profile,
    pub direction: Vec<C64>,
}

impl Forcing {
    pub fn new(profile: Profile, direction: Vec<C64>) -> Self {
        Forcing { profile, direction }
    }

    /// `φ` times the all-ones vector.
    pub fn uniform(profile: Profile, n: usize) -> Self {
        Forcing::new(profile, vec![C64::new(1.0, 0.0); n])
    }

    pub fn parse_profile(name: &str) -> Result<Profile> {
        Ok(match name {
            "constant" => Profile::Constant,
            "exponential-decay" => Profile::ExponentialDecay { rate: 1.0 },
            "gaussian-pulse" => Profile::GaussianPulse { center: 1.0, width: 0.25 },
            other => return Err(Error::Config(format!("unknown forcing `{other}`"))),
        })
    }

    pub fn phi(&self, t: f64) -> f64 {
        match self.profile {
            Profile::Constant => 1.0,
            Profile::ExponentialDecay { rate } => (-rate * t).exp(),
            Profile::GaussianPulse { center, width } => (-(t - center).powi(2) / (2.0 * width * width)).exp(),
        }
    }

    pub fn value(&self, t: f64) -> DVector<C64> {
        DVector::from_iterator(self.direction.len(), self.direction.iter().map(|c| c * self.phi(t)))
    }

    /// `∫₀^∞ e^{−zt} φ(t) dt`; the pulse is transformed numerically over
    /// `center ± 12 width`.
    pub fn phi_transform(&self, z: C64) -> C64 {
        match self.profile {
            Profile::Constant => 1.0 / z,
            Profile::ExponentialDecay { rate } => 1.0 / (z + rate),
            Profile::GaussianPulse { center, width } => {
                let lo = (center - 12.0 * width).max(0.0);
                let hi = center + 12.0 * width;
                let panels = (2.0 + (hi - lo) * (1.0 + z.im.abs()) / 2.0).ceil() as usize;
                let h = (hi - lo) / panels as f64;
                let parts: Vec<C64> = (0..panels)
                    .map(|p| {
                        let a = lo + p as f64 * h;
                        gk15(|t| (-z * t).exp() * self.phi(t), a, a + h).0
                    })
                    .collect();
                pairwise_sum(&parts)
            }
        }
    }

    pub fn transform(&self, z: C64) -> DVector<C64> {
        let s = self.phi_transform(z);
        DVector::from_iterator(self.direction.len(), self.direction.iter().map(|c| c * s))
    }
}

fn check_dimension(a: &CMatrix, len: usize) -> Result<()> {
    if len != a.n() {
        return Err(Error::Dimension { expected: a.n(), got: len });
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadratureInfo {
    pub step: f64,
    pub nodes: usize,
    pub y_max: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub t: Vec<f64>,
    pub values: Vec<DVector<C64>>,
    pub quadrature: QuadratureInfo,
}

fn spectral_abscissa(a: &CMatrix) -> Result<f64> {
    Ok(Resolvent::new(a)?.eigenvalues().iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max))
}

/// Sum in a fixed binary-tree order.
fn pairwise_sum(xs: &[C64]) -> C64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let (l, r) = xs.split_at(xs.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

pub fn laplace_reconstruct<F>(a: &CMatrix, f_transform: F, cfg: &CauchyConfig) -> Result<Reconstruction>
where
    F: Fn(C64) -> DVector<C64> + Sync,
{
    cfg.validate()?;
    let abscissa = spectral_abscissa(a)?;
    if !(cfg.gamma > abscissa) {
        return Err(Error::Config(format!(
            "contour Re z = {} does not clear the spectral abscissa {abscissa}",
            cfg.gamma
        )));
    }
    let n = a.n();
    let ys = linspace(-cfg.y_max, cfg.y_max, cfg.y_count);
    let h = cfg.step();
    let solved: Vec<DVector<C64>> = ys
        .par_iter()
        .map(|&y| {
            let z = C64::new(cfg.gamma, y);
            let rhs = f_transform(z);
            check_dimension(a, rhs.len())?;
            let shifted = a.shift(z).into_dmatrix() * C64::new(-1.0, 0.0);
            shifted.lu().solve(&rhs).ok_or_else(|| Error::Config(format!("contour meets the spectrum at z = {z}")))
        })
        .collect::<Result<_>>()?;

    let last = ys.len() - 1;
    let values = cfg
        .t_eval
        .iter()
        .map(|&t| {
            DVector::from_iterator(
                n,
                (0..n).map(|i| {
                    let terms: Vec<C64> = ys
                        .par_iter()
                        .enumerate()
                        .map(|(j, &y)| {
                            let w = if j == 0 || j == last { 0.5 * h } else { h };
                            (C64::new(cfg.gamma, y) * t).exp() * solved[j][i] * w
                        })
                        .collect();
                    pairwise_sum(&terms) / (2.0 * std::f64::consts::PI)
                }),
            )
        })
        .collect();
    Ok(Reconstruction {
        t: cfg.t_eval.clone(),
        values,
        quadrature: QuadratureInfo { step: h, nodes: cfg.y_count, y_max: cfg.y_max, gamma: cfg.gamma },
    })
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss weights at `XGK[1], XGK[3], XGK[5], 0`.
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// Kronrod estimate and `‖Kronrod − Gauss‖`.
fn gk15_vec<F: Fn(f64) -> DVector<C64>>(f: F, a: f64, b: f64, n: usize) -> (DVector<C64>, f64) {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let mut k = DVector::<C64>::zeros(n);
    let mut g = DVector::<C64>::zeros(n);
    for (i, (&x, &w)) in XGK.iter().zip(&WGK).enumerate() {
        let pts = if x == 0.0 { vec![c] } else { vec![c - r * x, c + r * x] };
        for p in pts {
            let v = f(p);
            k.axpy(C64::new(w, 0.0), &v, C64::new(1.0, 0.0));
            if i % 2 == 1 {
                g.axpy(C64::new(WG[i / 2], 0.0), &v, C64::new(1.0, 0.0));
            } else if i == 7 {
                g.axpy(C64::new(WG[3], 0.0), &v, C64::new(1.0, 0.0));
            }
        }
    }
    let e = (&k - &g).norm() * r;
    (k * C64::new(r, 0.0), e)
}

fn gk15<F: Fn(f64) -> C64>(f: F, a: f64, b: f64) -> (C64, f64) {
    let (v, e) = gk15_vec(|t| DVector::from_element(1, f(t)), a, b, 1);
    (v[0], e)
}

/// Adaptive bisection until each panel's error is below its share of `tol`.
fn adaptive_gk<F>(f: &F, a: f64, b: f64, tol: f64, depth: usize, n: usize) -> DVector<C64>
where
    F: Fn(f64) -> DVector<C64>,
{
    let (v, e) = gk15_vec(f, a, b, n);
    if e <= tol || depth == 0 {
        return v;
    }
    let m = 0.5 * (a + b);
    adaptive_gk(f, a, m, 0.5 * tol, depth - 1, n) + adaptive_gk(f, m, b, 0.5 * tol, depth - 1, n)
}

/// Duhamel integral `∫₀ᵗ e^{A(t−s)} f(s) ds` for each `t`.
pub fn reference_solution<F>(a: &CMatrix, f: F, t_eval: &[f64]) -> Result<Vec<DVector<C64>>>
where
    F: Fn(f64) -> DVector<C64> + Sync,
{
    let n = a.n();
    check_dimension(a, f(0.0).len())?;
    t_eval
        .par_iter()
        .map(|&t| {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("evaluation time {t} must be nonnegative")));
            }
            if t == 0.0 {
                return Ok(DVector::zeros(n));
            }
            let integrand = |s: f64| -> DVector<C64> {
                match expm(&a.scale(C64::new(t - s, 0.0))) {
                    Ok(e) => e.as_dmatrix() * f(s),
                    Err(_) => DVector::from_element(n, C64::new(f64::NAN, 0.0)),
                }
            };
            let coarse = gk15_vec(integrand, 0.0, t, n).0;
            let tol = 1e-10 * (1.0 + coarse.norm());
            let v = adaptive_gk(&integrand, 0.0, t, tol, 30, n);
            if v.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
                return Err(Error::Domain("reference quadrature is not finite".into()));
            }
            Ok(v)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct EnvelopeRow {
    pub y: f64,
    pub true_norm: f64,
    pub old_envelope: f64,
    #[serde(serialize_with = "opt_f64_marked")]
    pub new_envelope: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolutionRow {
    pub t: f64,
    pub component: usize,
    pub reconstructed: C64,
    pub reference: C64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnvelopeComparison {
    pub gamma: f64,
    pub alpha: f64,
    pub k_old: f64,
    pub k_new: Option<f64>,
    /// Why the new envelope is absent, if it is.
    pub new_unavailable: Option<String>,
    pub auto_filled: bool,
    pub rows: Vec<EnvelopeRow>,
    pub solution: Vec<SolutionRow>,
    /// Envelope violations beyond the relative slack, as `(y, which)`.
    pub violations: Vec<(f64, String)>,
    pub quadrature: QuadratureInfo,
}

pub const ENVELOPE_CSV_HEADER: &str = "y,true_norm,old_env,new_env";
pub const SOLUTION_CSV_HEADER: &str =
    "t,component,reconstructed_re,reconstructed_im,reference_re,reference_im,abs_error";

impl EnvelopeComparison {
    /// Unavailable new-envelope cells are left empty.
    pub fn envelope_csv(&self) -> String {
        let mut s = String::with_capacity(self.rows.len() * 80);
        s.push_str(ENVELOPE_CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let new = r.new_envelope.map(|v| format!("{v:e}")).unwrap_or_default();
            s.push_str(&format!("{:e},{:e},{:e},{new}\n", r.y, r.true_norm, r.old_envelope));
        }
        s
    }

    pub fn solution_csv(&self) -> String {
        let mut s = String::from(SOLUTION_CSV_HEADER);
        s.push('\n');
        for r in &self.solution {
            s.push_str(&format!(
                "{:e},{},{:e},{:e},{:e},{:e},{:e}\n",
                r.t, r.component, r.reconstructed.re, r.reconstructed.im, r.reference.re, r.reference.im, r.abs_error
            ));
        }
        s
    }

    /// Least-squares slope of `log new_env` against `log |y|` on `lo ≤ |y| ≤ hi`.
    pub fn new_envelope_slope(&self, lo: f64, hi: f64) -> Option<f64> {
        let (xs, ys): (Vec<f64>, Vec<f64>) = self
            .rows
            .iter()
            .filter(|r| r.y.abs() >= lo && r.y.abs() <= hi)
            .filter_map(|r| Some((r.y.abs(), r.new_envelope?)))
            .unzip();
        (xs.len() >= 2).then(|| crate::constants::fit_log_slope(&xs, &ys))
    }
}

/// Tabulates `‖(zI − A)⁻¹‖` against `K_old/(γ − α)` and
/// `K_new / min_λ |z − λ|` along `z = γ + iy`, and compares the contour
/// reconstruction of `forcing` with its Duhamel reference.
///
/// Auto-filled constants: `α` is the abscissa plus [`ALPHA_MARGIN`],
/// `K_old` the Kreiss constant of `A − αI` (so `K_old/(Re z − α)` bounds the
/// resolvent for `Re z > α`), and `K_new = 𝒦(A)`, which applies on the
/// contour only when `γ > 0`.
pub fn envelope_comparison(
    a: &CMatrix,
    forcing: &Forcing,
    cfg: &CauchyConfig,
    search: &SearchConfig,
) -> Result<EnvelopeComparison> {
    cfg.validate()?;
    check_dimension(a, forcing.direction.len())?;
    let resolvent = Resolvent::new(a)?;
    let eigs = resolvent.eigenvalues().to_vec();
    let abscissa = eigs.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
    let alpha = cfg.alpha.unwrap_or(abscissa + ALPHA_MARGIN);
    if !(cfg.gamma > alpha) {
        return Err(Error::Config(format!("γ = {} must exceed α = {alpha}", cfg.gamma)));
    }
    let auto_filled = cfg.k_old.is_none() && cfg.k_new.is_none() && cfg.alpha.is_none();

    let k_old = match cfg.k_old {
        Some(k) => k,
        None => {
            let r = kreiss_constant_continuous(&a.shift(C64::new(alpha, 0.0)), search)?;
            if r.unbounded() {
                return Err(Error::Config("Kreiss constant of A − αI is unbounded".into()));
            }
            r.value
        }
    };
    let (k_new, new_unavailable) = match cfg.k_new {
        Some(k) => (Some(k), None),
        None if cfg.gamma <= 0.0 => (None, Some("contour lies outside the right half-plane".to_string())),
        None => {
            let mut seeded = search.clone();
            let k2 = kreiss_constant_continuous(a, search)?;
            if let Argmax::Point { re, im } = k2.argmax {
                seeded.extra_seeds.push(C64::new(re, im));
            }
            let r = calk_continuous(a, &seeded)?;
            if r.unbounded() {
                (None, Some("spectrum-relative constant diverges".to_string()))
            } else {
                (Some(r.value), None)
            }
        }
    };

    let ys = linspace(-cfg.y_max, cfg.y_max, cfg.y_count);
    let old = k_old / (cfg.gamma - alpha);
    let rows: Vec<EnvelopeRow> = ys
        .par_iter()
        .map(|&y| {
            let z = C64::new(cfg.gamma, y);
            let dist = eigs.iter().map(|l| (z - l).norm()).fold(f64::INFINITY, f64::min);
            Ok(EnvelopeRow {
                y,
                true_norm: resolvent.norm_at(z)?,
                old_envelope: old,
                new_envelope: k_new.map(|k| k / dist),
            })
        })
        .collect::<Result<_>>()?;

    let mut violations = Vec::new();
    if auto_filled {
        for r in &rows {
            if r.true_norm > r.old_envelope * (1.0 + ENVELOPE_SLACK) {
                violations.push((r.y, "old".to_string()));
            }
            if r.new_envelope.is_some_and(|e| r.true_norm > e * (1.0 + ENVELOPE_SLACK)) {
                violations.push((r.y, "new".to_string()));
            }
        }
    }

    let rec = laplace_reconstruct(a, |z| forcing.transform(z), cfg)?;
    let reference = reference_solution(a, |t| forcing.value(t), &cfg.t_eval)?;
    let solution = rec
        .t
        .iter()
        .zip(rec.values.iter().zip(&reference))
        .flat_map(|(&t, (u, v))| {
            (0..a.n()).map(move |i| SolutionRow {
                t,
                component: i,
                reconstructed: u[i],
                reference: v[i],
                abs_error: (u[i] - v[i]).norm(),
            })
        })
        .collect();

    Ok(EnvelopeComparison {
        gamma: cfg.gamma,
        alpha,
        k_old,
        k_new,
        new_unavailable,
        auto_filled,
        rows,
        solution,
        violations,
        quadrature: rec.quadrature,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn small(t: Vec<f64>) -> CauchyConfig {
        CauchyConfig { y_max: 200.0, y_count: 40_001, t_eval: t, ..CauchyConfig::default() }
    }

    #[test]
    fn scalar_constant_forcing() {
        let a = CMatrix::diag_real(&[-1.0]);
        let f = Forcing::uniform(Profile::Constant, 1);
        let rec = laplace_reconstruct(&a, |z| f.transform(z), &small(vec![1.0, 2.0])).unwrap();
        for (t, u) in rec.t.iter().zip(&rec.values) {
            assert!((u[0] - c(1.0 - (-t).exp(), 0.0)).norm() < 1e-3, "{t}: {}", u[0]);
        }
        let zero = laplace_reconstruct(&a, |_| DVector::zeros(1), &small(vec![1.0])).unwrap();
        assert_eq!(zero.values[0][0], c(0.0, 0.0));
    }

    #[test]
    fn oscillatory_scalar() {
        let a = CMatrix::diag(&[c(0.0, 1.0)]);
        let f = Forcing::uniform(Profile::ExponentialDecay { rate: 1.0 }, 1);
        let exact = (c(0.0, 1.0).exp() - (-1f64).exp()) / c(1.0, 1.0);
        let rec = laplace_reconstruct(&a, |z| f.transform(z), &small(vec![1.0])).unwrap();
        assert!((rec.values[0][0] - exact).norm() < 1e-3);
        let r = reference_solution(&a, |t| f.value(t), &[1.0]).unwrap();
        assert!((r[0][0] - exact).norm() < 1e-9);
    }

    #[test]
    fn reference_closed_forms() {
        let zero = CMatrix::zeros(2);
        let f = Forcing::new(Profile::Constant, vec![c(3.0, 0.0), c(0.0, -1.0)]);
        let r = reference_solution(&zero, |t| f.value(t), &[0.0, 2.5]).unwrap();
        assert_eq!(r[0].norm(), 0.0);
        assert!((r[1][0] - c(7.5, 0.0)).norm() < 1e-12);
        assert!((r[1][1] - c(0.0, -2.5)).norm() < 1e-12);
    }

    #[test]
    fn pulse_transform_matches_quadrature() {
        let f = Forcing::uniform(Profile::GaussianPulse { center: 1.0, width: 0.25 }, 1);
        let a = CMatrix::diag_real(&[-0.5]);
        let rec = laplace_reconstruct(&a, |z| f.transform(z), &small(vec![1.5])).unwrap();
        let r = reference_solution(&a, |t| f.value(t), &[1.5]).unwrap();
        assert!((rec.values[0][0] - r[0][0]).norm() < 1e-4);
    }

    #[test]
    fn contour_must_clear_spectrum() {
        let a = CMatrix::diag_real(&[2.0]);
        let f = Forcing::uniform(Profile::Constant, 1);
        assert!(matches!(laplace_reconstruct(&a, |z| f.transform(z), &small(vec![1.0])), Err(Error::Config(_))));
    }

    #[test]
    fn envelopes_for_normal_matrix() {
        let a = CMatrix::diag(&[c(-1.0, 0.0), c(-0.5, 2.0)]);
        let f = Forcing::uniform(Profile::Constant, 2);
        let cfg = CauchyConfig { y_count: 2001, ..small(vec![1.0]) };
        let cmp = envelope_comparison(&a, &f, &cfg, &SearchConfig::default()).unwrap();
        assert!(cmp.violations.is_empty(), "{:?}", cmp.violations);
        for r in &cmp.rows {
            let e = r.new_envelope.unwrap();
            assert!((e - r.true_norm).abs() <= 1e-3 * r.true_norm);
        }
        assert!(cmp.rows.iter().all(|r| r.old_envelope == cmp.rows[0].old_envelope));
    }

    #[test]
    fn defective_axis_marks_new_envelope_unavailable() {
        let a = CMatrix::direct_sum(&[CMatrix::jordan(c(0.0, 1.0), 2)]);
        let f = Forcing::uniform(Profile::Constant, 2);
        let cfg = CauchyConfig { y_count: 101, ..small(vec![0.5]) };
        let cmp = envelope_comparison(&a, &f, &cfg, &SearchConfig::default()).unwrap();
        assert!(cmp.k_new.is_none() && cmp.new_unavailable.is_some());
        assert!(cmp.envelope_csv().lines().nth(1).unwrap().ends_with(','));
    }
}
