// SPDX-License-Identifier: Apache-2.0

//! Supremum search and the stability functionals built on it:
//!
//! | functional | field | domain |
//! |---|---|---|
//! | [`sup_semigroup_norm`] | `‖e^{Mt}‖` | `t ≥ 0` |
//! | [`sup_power_norm`] | `‖M^ν‖` | `ν ∈ ℕ` |
//! | [`kreiss_constant_continuous`] | `Re z · ‖R(z)‖` | `Re z > 0` |
//! | [`kreiss_constant_discrete`] | `(|z| − 1) · ‖R(z)‖` | `|z| > 1` |
//! | [`calk_continuous`] | `‖R(z)‖ · min_{σ∖ℍ} |z − λ|` | `Re z > 0` |
//! | [`calk_discrete`] | `‖R(z)‖ · min_{σ} |z − λ|` | `|z| > 1` |
//!
//! Values are lower bounds. A result is flagged `diverged` only with
//! evidence: a monotone growth run along a geometric approach sequence, an
//! eigenvalue outside the stability region, or overflow.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{expm, spectral_norm, CMatrix, C64};
use crate::resolvent::{ContinuousRatio, DiscreteRatio, Resolvent};
use crate::serde_ext::f64_marked;
use crate::spectra::{spectrum, SpectrumReport};

#[derive(Debug, Clone, Serialize)]
pub struct SearchConfig {
    /// Coarse grid resolution per axis.
    pub grid: usize,
    /// Pattern-search iterations per start.
    pub refine_iters: usize,
    /// Number of refinement starts taken from the best seeds.
    pub starts: usize,
    pub divergence_threshold: f64,
    /// Semigroup horizon; default `50 / (1 + |abscissa|)`, capped at `10³`.
    pub t_max: Option<f64>,
    pub nu_max: usize,
    /// Real-part cap (radius cap in discrete mode); default `10 (1 + ‖M‖)`.
    pub re_cap: Option<f64>,
    /// `|Im z|` cap; default `10 (1 + ‖M‖)`.
    pub im_cap: Option<f64>,
    pub seeds_near_spectrum: bool,
    /// Relative spectral tolerance (axis band, unit-circle band).
    pub tol: f64,
    /// Additional points always evaluated.
    pub extra_seeds: Vec<C64>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            grid: 32,
            refine_iters: 60,
            starts: 4,
            divergence_threshold: 1e6,
            t_max: None,
            nu_max: 10_000,
            re_cap: None,
            im_cap: None,
            seeds_near_spectrum: true,
            tol: crate::spectra::DEFAULT_TOL,
            extra_seeds: Vec::new(),
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(what.to_string()));
        if self.grid < 2 {
            return bad("grid must be at least 2");
        }
        if self.starts == 0 || self.nu_max == 0 {
            return bad("starts and nu_max must be positive");
        }
        if !(self.divergence_threshold > 1.0) {
            return bad("divergence threshold must exceed 1");
        }
        if !(self.tol >= 0.0) {
            return bad("tolerance must be nonnegative");
        }
        for (name, v) in [("t_max", self.t_max), ("re_cap", self.re_cap), ("im_cap", self.im_cap)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::Config(format!("{name} must be positive and finite")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Argmax {
    None,
    Time { t: f64 },
    Power { nu: usize },
    Point { re: f64, im: f64 },
}

/// Samples along a geometric approach with monotone growth.
#[derive(Debug, Clone, Serialize)]
pub struct GrowthCertificate {
    /// Approach distances `δ` (time `t` or power `ν` for suprema in time).
    pub parameter: Vec<f64>,
    pub values: Vec<f64>,
    /// `d log(value) / d log(parameter)` over the tail.
    pub log_slope: f64,
    pub crossed_threshold: bool,
    /// The sequence ended because the next point was numerically singular.
    pub terminated_singular: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Evidence {
    /// `σ(M) ∖ ℍ` is empty, so `𝒦(M) = +∞` by convention.
    EmptyBoundarySpectrum,
    Growth(GrowthCertificate),
    /// An eigenvalue outside the closed stability region forces exponential growth.
    UnstableEigenvalue {
        eigenvalue: C64,
    },
    Overflow {
        at: f64,
    },
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TracePoint {
    pub level: usize,
    #[serde(serialize_with = "f64_marked")]
    pub best: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SupSearchResult {
    #[serde(serialize_with = "f64_marked")]
    pub value: f64,
    pub argmax: Argmax,
    pub diverged: bool,
    /// The value is the exact supremum up to evaluation accuracy.
    pub certified: bool,
    pub evidence: Option<Evidence>,
    /// Running best per refinement level; nondecreasing.
    pub trace: Vec<TracePoint>,
    pub budget_used: usize,
}

impl SupSearchResult {
    /// Diverged or `+∞` by convention.
    pub fn unbounded(&self) -> bool {
        self.diverged || self.value == f64::INFINITY
    }

    pub fn growth(&self) -> Option<&GrowthCertificate> {
        match &self.evidence {
            Some(Evidence::Growth(g)) => Some(g),
            _ => None,
        }
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> =
        xs.iter().zip(ys).filter(|(x, y)| **x > 0.0 && **y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return 0.0;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Samples in a monotone run must not drop by more than this fraction.
const MONOTONE_SLACK: f64 = 1e-12;
/// Minimum length of a monotone run counted as growth.
const MIN_RUN: usize = 4;
/// Growth rate (in log-log) that counts as unbounded.
const MIN_GROWTH_SLOPE: f64 = 0.5;

/// Start index of the longest monotone nondecreasing suffix.
fn monotone_suffix(values: &[f64]) -> usize {
    let mut start = values.len().saturating_sub(1);
    while start > 0 && values[start] >= values[start - 1] * (1.0 - MONOTONE_SLACK) {
        start -= 1;
    }
    start
}

/// Growth certificate along an approach `δ ↓ 0`, if the run qualifies.
fn approach_certificate(
    deltas: &[f64],
    values: &[f64],
    terminated_singular: bool,
    threshold: f64,
) -> Option<GrowthCertificate> {
    let start = monotone_suffix(values);
    if values.len() - start < MIN_RUN {
        return None;
    }
    let tail = values.len().saturating_sub(6).max(start);
    let slope = fit_log_slope(&deltas[tail..], &values[tail..]);
    let last = *values.last().unwrap();
    let crossed = last >= threshold;
    if -slope >= MIN_GROWTH_SLOPE && (crossed || terminated_singular) {
        Some(GrowthCertificate {
            parameter: deltas[start..].to_vec(),
            values: values[start..].to_vec(),
            log_slope: slope,
            crossed_threshold: crossed,
            terminated_singular,
        })
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Geometry {
    /// `z = e^u + i v`
    HalfPlane,
    /// `z = (1 + e^u) e^{iv}`
    OutsideDisk,
}

struct Domain {
    geometry: Geometry,
    scale: f64,
    cap: f64,
    im_cap: f64,
}

impl Domain {
    fn z(&self, u: f64, v: f64) -> C64 {
        match self.geometry {
            Geometry::HalfPlane => C64::new(u.exp(), v),
            Geometry::OutsideDisk => C64::from_polar(1.0 + u.exp(), v),
        }
    }

    fn uv(&self, z: C64) -> (f64, f64) {
        match self.geometry {
            Geometry::HalfPlane => (z.re.ln(), z.im),
            Geometry::OutsideDisk => ((z.norm() - 1.0).ln(), z.arg()),
        }
    }

    fn contains(&self, z: C64) -> bool {
        match self.geometry {
            Geometry::HalfPlane => z.re > 0.0,
            Geometry::OutsideDisk => z.norm() > 1.0,
        }
    }

    /// Largest `u` the pattern search may reach.
    fn u_max(&self) -> f64 {
        (self.cap * 1e10).ln()
    }

    fn coarse_seeds(&self, grid: usize, eigs: &[C64]) -> Vec<C64> {
        let half = (grid / 2).max(1);
        let near = self.scale * 1e-6;
        let far = match self.geometry {
            Geometry::HalfPlane => self.cap,
            Geometry::OutsideDisk => self.cap - 1.0,
        }
        .max(near * 10.0);
        let mut margins: Vec<f64> =
            (0..half).map(|i| near * (far / near).powf(i as f64 / (half - 1).max(1) as f64)).collect();
        margins.extend((1..=grid - half).map(|i| far * i as f64 / (grid - half) as f64));

        let mut angles: Vec<f64> = match self.geometry {
            Geometry::HalfPlane => crate::resolvent::linspace(-self.im_cap, self.im_cap, grid),
            Geometry::OutsideDisk => (0..grid).map(|i| 2.0 * PI * i as f64 / grid as f64).collect(),
        };
        angles.push(0.0);
        for l in eigs {
            angles.push(match self.geometry {
                Geometry::HalfPlane => l.im,
                Geometry::OutsideDisk => l.arg(),
            });
        }

        let mut seeds = Vec::with_capacity(margins.len() * angles.len() + 16);
        for &v in &angles {
            for &m in &margins {
                seeds.push(match self.geometry {
                    Geometry::HalfPlane => C64::new(m, v),
                    Geometry::OutsideDisk => C64::from_polar(1.0 + m, v),
                });
            }
        }
        // far field: every field here has a limit as |z| → ∞ along the reals
        for k in 1..=10 {
            let r = self.cap * 10f64.powi(k);
            seeds.push(C64::new(r, 0.0));
            if self.geometry == Geometry::OutsideDisk {
                seeds.push(C64::new(-r, 0.0));
            }
        }
        seeds
    }

    /// Geometric approach to each eigenvalue, or to its projection onto the
    /// boundary when it lies outside the domain.
    fn approaches(&self, eigs: &[C64], band: f64) -> Vec<(Vec<f64>, Vec<C64>)> {
        let deltas: Vec<f64> = (0..=28).map(|j| self.scale * 10f64.powf(-(j as f64) / 2.0)).collect();
        eigs.iter()
            .map(|&l| {
                let pts = deltas
                    .iter()
                    .map(|&d| match self.geometry {
                        Geometry::HalfPlane => {
                            let base = if l.re > band { l } else { C64::new(0.0, l.im) };
                            base + d
                        }
                        Geometry::OutsideDisk => {
                            let r = l.norm();
                            let dir = if r > 0.0 { l / r } else { C64::new(1.0, 0.0) };
                            dir * (r.max(1.0) + d)
                        }
                    })
                    .collect();
                (deltas.clone(), pts)
            })
            .collect()
    }
}

/// Points closer than this multiple of `u·scale` to a computed eigenvalue
/// carry eigenvalue rounding error above `10⁻⁶` relative; they feed growth
/// certificates but never the reported supremum.
const RESOLUTION_FACTOR: f64 = 1e6;

/// Distances, points, values and whether the approach hit a singular point.
type ApproachRun = (Vec<f64>, Vec<C64>, Vec<f64>, bool);

/// Maximizes `f` over the domain: coarse seeds, approach sequences toward
/// the spectrum, then pattern search from the best seeds.
fn search_field<F>(f: &F, dom: &Domain, eigs: &[C64], band: f64, cfg: &SearchConfig) -> SupSearchResult
where
    F: Fn(C64) -> Result<f64> + Sync,
{
    let floor = RESOLUTION_FACTOR * f64::EPSILON * dom.scale;
    let resolved = |z: C64| eigs.iter().all(|l| (z - l).norm() >= floor);
    let f_raw = f;
    let f = &|z: C64| {
        if resolved(z) {
            f_raw(z)
        } else {
            Err(Error::SingularPoint { z, condition: f64::INFINITY })
        }
    };
    let mut seeds = dom.coarse_seeds(cfg.grid, eigs);
    seeds.extend(cfg.extra_seeds.iter().copied().filter(|z| dom.contains(*z)));
    let seed_vals: Vec<Option<f64>> = seeds.par_iter().map(|&z| f(z).ok()).collect();
    let mut budget = seeds.len();

    let mut best = f64::NEG_INFINITY;
    let mut arg = None;
    let consider = |z: C64, v: f64, best: &mut f64, arg: &mut Option<C64>| {
        if v > *best {
            *best = v;
            *arg = Some(z);
        }
    };
    for (z, v) in seeds.iter().zip(&seed_vals) {
        if let Some(v) = v {
            consider(*z, *v, &mut best, &mut arg);
        }
    }
    let mut trace = vec![TracePoint { level: 0, best }];

    let mut evidence = None;
    let mut diverged = false;
    if cfg.seeds_near_spectrum {
        let runs: Vec<ApproachRun> = dom
            .approaches(eigs, band)
            .into_par_iter()
            .map(|(deltas, pts)| {
                let mut vals = Vec::new();
                let mut singular = false;
                for &z in &pts {
                    match f_raw(z) {
                        Ok(v) if v.is_finite() => vals.push(v),
                        _ => {
                            singular = true;
                            break;
                        }
                    }
                }
                let used = vals.len();
                (deltas[..used].to_vec(), pts[..used].to_vec(), vals, singular)
            })
            .collect();
        for (deltas, pts, vals, singular) in runs {
            budget += vals.len() + usize::from(singular);
            for (z, v) in pts.iter().zip(&vals) {
                if resolved(*z) {
                    consider(*z, *v, &mut best, &mut arg);
                }
            }
            if !diverged {
                if let Some(cert) = approach_certificate(&deltas, &vals, singular, cfg.divergence_threshold) {
                    diverged = true;
                    evidence = Some(Evidence::Growth(cert));
                }
            }
        }
    }
    trace.push(TracePoint { level: 1, best });

    // refinement starts: best distinct seeds
    let mut order: Vec<usize> = (0..seeds.len()).filter(|&i| seed_vals[i].is_some()).collect();
    order.sort_by(|&a, &b| seed_vals[b].unwrap().total_cmp(&seed_vals[a].unwrap()).then(a.cmp(&b)));
    let mut starts: Vec<C64> = order.iter().take(cfg.starts).map(|&i| seeds[i]).collect();
    if let Some(z) = arg {
        if !diverged && !starts.contains(&z) {
            starts.push(z);
        }
    }

    let du0 = 1.0;
    let dv0 = match dom.geometry {
        Geometry::HalfPlane => 2.0 * dom.im_cap / cfg.grid as f64,
        Geometry::OutsideDisk => 2.0 * PI / cfg.grid as f64,
    };
    let histories: Vec<(Vec<f64>, C64, usize)> = starts
        .par_iter()
        .map(|&z0| {
            let (mut u, mut v) = dom.uv(z0);
            let mut cur = f(z0).unwrap_or(f64::NEG_INFINITY);
            let (mut du, mut dv) = (du0, dv0);
            let mut hist = Vec::with_capacity(cfg.refine_iters);
            let mut evals = 1;
            for _ in 0..cfg.refine_iters {
                let cand = [(u + du, v), (u - du, v), (u, v + dv), (u, v - dv)];
                let mut moved = false;
                for (cu, cv) in cand {
                    if cu > dom.u_max() {
                        continue;
                    }
                    evals += 1;
                    if let Ok(val) = f(dom.z(cu, cv)) {
                        if val > cur {
                            cur = val;
                            u = cu;
                            v = cv;
                            moved = true;
                        }
                    }
                }
                if moved {
                    du = (du * 2.0).min(du0 * 4.0);
                    dv = (dv * 2.0).min(dv0 * 4.0);
                } else {
                    du *= 0.5;
                    dv *= 0.5;
                }
                hist.push(cur);
                if du < 1e-12 && dv < 1e-12 * (1.0 + v.abs()) {
                    break;
                }
            }
            (hist, dom.z(u, v), evals)
        })
        .collect();

    let levels = histories.iter().map(|h| h.0.len()).max().unwrap_or(0);
    for lvl in 0..levels {
        for (hist, _, _) in &histories {
            if let Some(&v) = hist.get(lvl).or(hist.last()) {
                best = best.max(v);
            }
        }
        trace.push(TracePoint { level: lvl + 2, best });
    }
    for (hist, z, evals) in &histories {
        budget += evals;
        if let Some(&v) = hist.last() {
            consider(*z, v, &mut best, &mut arg);
        }
    }

    SupSearchResult {
        value: best.max(0.0),
        argmax: arg.map_or(Argmax::None, |z| Argmax::Point { re: z.re, im: z.im }),
        diverged,
        certified: false,
        evidence,
        trace,
        budget_used: budget,
    }
}

fn scale_of(m: &CMatrix) -> f64 {
    1.0 + spectral_norm(m)
}

fn half_plane(m: &CMatrix, cfg: &SearchConfig) -> Domain {
    let s = scale_of(m);
    Domain {
        geometry: Geometry::HalfPlane,
        scale: s,
        cap: cfg.re_cap.unwrap_or(10.0 * s),
        im_cap: cfg.im_cap.unwrap_or(10.0 * s),
    }
}

fn outside_disk(m: &CMatrix, cfg: &SearchConfig) -> Domain {
    let s = scale_of(m);
    Domain {
        geometry: Geometry::OutsideDisk,
        scale: s,
        cap: cfg.re_cap.unwrap_or(10.0 * s).max(1.0 + 1e-6),
        im_cap: 0.0,
    }
}

fn report_for(m: &CMatrix, cfg: &SearchConfig) -> Result<SpectrumReport> {
    cfg.validate()?;
    spectrum(m, cfg.tol * scale_of(m))
}

/// `sup_{Re z > 0} Re z · ‖(zI − M)⁻¹‖`.
pub fn kreiss_constant_continuous(m: &CMatrix, cfg: &SearchConfig) -> Result<SupSearchResult> {
    let report = report_for(m, cfg)?;
    let res = Resolvent::new(m)?;
    let f = |z: C64| res.norm_at(z).map(|n| z.re * n);
    Ok(search_field(&f, &half_plane(m, cfg), &report.values(), report.axis_tolerance, cfg))
}

/// `sup_{|z| > 1} (|z| − 1) · ‖(zI − M)⁻¹‖`.
pub fn kreiss_constant_discrete(m: &CMatrix, cfg: &SearchConfig) -> Result<SupSearchResult> {
    let report = report_for(m, cfg)?;
    let res = Resolvent::new(m)?;
    let f = |z: C64| res.norm_at(z).map(|n| (z.norm() - 1.0) * n);
    Ok(search_field(&f, &outside_disk(m, cfg), &report.values(), report.axis_tolerance, cfg))
}

/// `𝒦(M)`; `+∞` without search when `σ(M) ∖ ℍ` is empty.
pub fn calk_continuous(m: &CMatrix, cfg: &SearchConfig) -> Result<SupSearchResult> {
    let report = report_for(m, cfg)?;
    let eval = ContinuousRatio::new(m)?;
    if eval.excluded.is_empty() {
        return Ok(SupSearchResult {
            value: f64::INFINITY,
            argmax: Argmax::None,
            diverged: false,
            certified: true,
            evidence: Some(Evidence::EmptyBoundarySpectrum),
            trace: vec![TracePoint { level: 0, best: f64::INFINITY }],
            budget_used: 0,
        });
    }
    let f = |z: C64| eval.at(z).map(|s| s.ratio);
    Ok(search_field(&f, &half_plane(m, cfg), &report.values(), report.axis_tolerance, cfg))
}

/// Discrete analog of `𝒦`, denominator over the full spectrum.
pub fn calk_discrete(m: &CMatrix, cfg: &SearchConfig) -> Result<SupSearchResult> {
    let report = report_for(m, cfg)?;
    let eval = DiscreteRatio::new(m)?;
    let f = |z: C64| eval.at(z).map(|s| s.ratio);
    Ok(search_field(&f, &outside_disk(m, cfg), &report.values(), report.axis_tolerance, cfg))
}

/// Golden-section maximization of `g` on `[a, b]`.
fn golden_max<G: Fn(f64) -> Option<f64>>(g: &G, mut a: f64, mut b: f64, iters: usize) -> (f64, f64, usize) {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let val = |t: f64| g(t).unwrap_or(f64::NEG_INFINITY);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (val(c), val(d));
    let mut evals = 2;
    for _ in 0..iters {
        if (b - a).abs() <= 1e-12 * (1.0 + b.abs()) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = val(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = val(d);
        }
        evals += 1;
    }
    if fc >= fd {
        (c, fc, evals)
    } else {
        (d, fd, evals)
    }
}

/// `sup_{t ≥ 0} ‖e^{Mt}‖` on `[0, t_max]`, extending the horizon by decades
/// while the tail keeps growing. Once some `‖e^{Mτ}‖ < 1`, the supremum over
/// `[0, τ]` is the supremum over all `t ≥ 0`.
pub fn sup_semigroup_norm(m: &CMatrix, cfg: &SearchConfig) -> Result<SupSearchResult> {
    let report = report_for(m, cfg)?;
    let band = report.axis_tolerance;
    let t_max = cfg.t_max.unwrap_or_else(|| (50.0 / (1.0 + report.abscissa.abs())).min(1e3));
    let norm_at = |t: f64| -> Result<f64> { Ok(spectral_norm(&expm(&m.scale(C64::new(t, 0.0)))?)) };

    let dense = (16 * cfg.grid).max(256);
    let mut samples: Vec<(f64, f64)> = Vec::new();
    let mut budget = 0;
    let mut overflow_at = None;
    let mut horizon = t_max;
    let mut lo = 0.0;
    let mut trace = Vec::new();
    let mut certified = false;
    let mut tail_growth = None;

    loop {
        let mut ts = crate::resolvent::linspace(lo, horizon, dense);
        let geo = 64;
        let t0 = (horizon * 1e-6).max(lo);
        if t0 > 0.0 {
            ts.extend((0..geo).map(|i| t0 * (horizon / t0).powf(i as f64 / (geo - 1) as f64)));
        }
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        let vals: Vec<Result<f64>> = ts.par_iter().map(|&t| norm_at(t)).collect();
        budget += ts.len();
        for (t, v) in ts.iter().zip(vals) {
            match v {
                Ok(v) => samples.push((*t, v)),
                Err(_) => {
                    overflow_at.get_or_insert(*t);
                }
            }
        }
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        let best = samples.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
        trace.push(TracePoint { level: trace.len(), best });

        if samples.iter().any(|&(t, v)| t > 0.0 && v < 1.0) {
            certified = overflow_at.is_none();
            break;
        }
        if overflow_at.is_some() {
            break;
        }
        let tail: Vec<(f64, f64)> = samples.iter().copied().filter(|&(t, _)| t >= horizon / 10.0).collect();
        let tv: Vec<f64> = tail.iter().map(|p| p.1).collect();
        let tt: Vec<f64> = tail.iter().map(|p| p.0).collect();
        let growing = tv.len() >= MIN_RUN && monotone_suffix(&tv) == 0 && tv.last() > tv.first();
        let slope = fit_log_slope(&tt, &tv);
        tail_growth = if growing {
            Some(GrowthCertificate {
                parameter: tt,
                values: tv.clone(),
                log_slope: slope,
                crossed_threshold: *tv.last().unwrap() >= cfg.divergence_threshold,
                terminated_singular: false,
            })
        } else {
            None
        };
        if growing && slope >= MIN_GROWTH_SLOPE && horizon < 100.0 * t_max {
            lo = horizon;
            horizon *= 10.0;
            continue;
        }
        break;
    }

    // refine around the best grid sample
    let (mut bt, mut bv) =
        samples.iter().copied().fold((0.0, f64::NEG_INFINITY), |acc, s| if s.1 > acc.1 { s } else { acc });
    if let Some(i) = samples.iter().position(|s| s.0 == bt) {
        let a = samples[i.saturating_sub(1)].0;
        let b = samples[(i + 1).min(samples.len() - 1)].0;
        if b > a {
            let (t, v, e) = golden_max(&|t| norm_at(t).ok(), a, b, 80);
            budget += e;
            if v > bv {
                bt = t;
                bv = v;
            }
        }
    }
    trace.push(TracePoint { level: trace.len(), best: bv });

    let unstable = report.eigenvalues.iter().find(|c| c.value.re > band).map(|c| c.value);
    let (diverged, evidence) = if certified {
        (false, None)
    } else if let Some(t) = overflow_at {
        (true, Some(Evidence::Overflow { at: t }))
    } else if let Some(l) = unstable {
        (true, Some(Evidence::UnstableEigenvalue { eigenvalue: l }))
    } else {
        match tail_growth {
            Some(g) if g.log_slope >= MIN_GROWTH_SLOPE || g.crossed_threshold => (true, Some(Evidence::Growth(g))),
            _ => (false, None),
        }
    };
    Ok(SupSearchResult {
        value: bv,
        argmax: Argmax::Time { t: bt },
        diverged,
        certified,
        evidence,
        trace,
        budget_used: budget,
    })
}

/// `max_{0 ≤ ν ≤ ν_max} ‖M^ν‖`. Stops as soon as `‖M^ν‖ < 1`: submultiplicativity
/// then bounds every later power by an earlier one.
pub fn sup_power_norm(m: &CMatrix, cfg: &SearchConfig) -> Result<SupSearchResult> {
    let report = report_for(m, cfg)?;
    let band = report.axis_tolerance;
    let mut p = CMatrix::identity(m.n());
    let mut best = 1.0;
    let mut arg = 0;
    let mut norms = vec![1.0];
    let mut trace = vec![TracePoint { level: 0, best }];
    let mut certified = false;
    let mut overflow = None;
    for nu in 1..=cfg.nu_max {
        p = p.matmul(m);
        let v = spectral_norm(&p);
        if !v.is_finite() {
            overflow = Some(nu);
            break;
        }
        norms.push(v);
        if v > best {
            best = v;
            arg = nu;
        }
        if nu.is_power_of_two() {
            trace.push(TracePoint { level: trace.len(), best });
        }
        if v < 1.0 {
            certified = true;
            break;
        }
    }
    trace.push(TracePoint { level: trace.len(), best });

    let unstable = report.eigenvalues.iter().find(|c| c.value.norm() > 1.0 + band).map(|c| c.value);
    let on_circle = report.radius >= 1.0 - band;
    let (diverged, evidence) = if certified {
        (false, None)
    } else if let Some(nu) = overflow {
        (true, Some(Evidence::Overflow { at: nu as f64 }))
    } else if let Some(l) = unstable {
        (true, Some(Evidence::UnstableEigenvalue { eigenvalue: l }))
    } else {
        let k0 = norms.len() / 10;
        let tail = &norms[k0.max(1)..];
        let nus: Vec<f64> = (k0.max(1)..norms.len()).map(|k| k as f64).collect();
        let growing = tail.len() >= MIN_RUN && monotone_suffix(tail) == 0 && tail.last() > tail.first();
        let slope = fit_log_slope(&nus, tail);
        let crossed = best >= cfg.divergence_threshold;
        if on_circle && growing && (slope >= MIN_GROWTH_SLOPE || crossed) {
            let g = GrowthCertificate {
                parameter: nus,
                values: tail.to_vec(),
                log_slope: slope,
                crossed_threshold: crossed,
                terminated_singular: false,
            };
            (true, Some(Evidence::Growth(g)))
        } else {
            (false, None)
        }
    };
    Ok(SupSearchResult {
        value: best,
        argmax: Argmax::Power { nu: arg },
        diverged,
        certified,
        evidence,
        trace,
        budget_used: norms.len(),
    })
}
