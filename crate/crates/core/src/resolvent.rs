// SPDX-License-Identifier: Apache-2.0

//! Resolvent norms `‖(zI − M)⁻¹‖`, the ratio fields behind the Kreiss
//! functionals, the Jordan-block resolvent and the regions `S(M,r)`, `T(M,r)`.
//!
//! The ratio denominator `max_λ |z − λ|⁻¹` is carried as `min_λ |z − λ|`
//! so that nothing overflows near the spectrum.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    dmatrix_spectral_norm, frobenius, schur, spectral_norm, upper_triangular_inverse, CMatrix, Ordering, C64,
};
use crate::serde_ext::{f64_marked, fmt_f64};
use crate::spectra::{boundary_excluded_spectrum, default_cluster_tol, spectrum};

/// `zI − M` counts as singular above this condition estimate.
pub const SINGULAR_CONDITION: f64 = 1e14;

/// Grid points this close to an eigenvalue are flagged, not evaluated.
pub const GRID_SINGULAR_DIST: f64 = 1e-12;

/// Which eigenvalues enter the ratio denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Denominator {
    /// `σ(M) \ ℍ`.
    Excluded,
    FullSpectrum,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EvalPoint {
    pub z: C64,
    /// `Re z` (continuous) or `|z| − 1` (discrete).
    pub half_plane_margin: f64,
}

impl EvalPoint {
    pub fn continuous(z: C64) -> Self {
        EvalPoint { z, half_plane_margin: z.re }
    }

    pub fn discrete(z: C64) -> Self {
        EvalPoint { z, half_plane_margin: z.norm() - 1.0 }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RatioSample {
    pub z: C64,
    pub resolvent_norm: f64,
    /// `max_λ |z − λ|⁻¹`; zero for an empty eigenvalue set.
    pub denominator: f64,
    /// `+∞` exactly when the eigenvalue set is empty.
    #[serde(serialize_with = "f64_marked")]
    pub ratio: f64,
    pub denominator_kind: Denominator,
}

/// Resolvent evaluator with the Schur form of `M` cached:
/// `‖(zI − M)⁻¹‖ = ‖(zI − T)⁻¹‖`.
#[derive(Debug, Clone)]
pub struct Resolvent {
    t: DMatrix<C64>,
    eigenvalues: Vec<C64>,
    norm: f64,
}

impl Resolvent {
    pub fn new(m: &CMatrix) -> Result<Self> {
        let sf = schur(m, Ordering::None)?;
        Ok(Resolvent { eigenvalues: sf.eigenvalues(), t: sf.t.into_dmatrix(), norm: spectral_norm(m) })
    }

    pub fn n(&self) -> usize {
        self.t.nrows()
    }

    pub fn matrix_norm(&self) -> f64 {
        self.norm
    }

    /// Schur eigenvalues, with multiplicity.
    pub fn eigenvalues(&self) -> &[C64] {
        &self.eigenvalues
    }

    pub fn norm_at(&self, z: C64) -> Result<f64> {
        let shifted =
            DMatrix::from_fn(self.n(), self.n(), |i, j| if i == j { z - self.t[(i, j)] } else { -self.t[(i, j)] });
        let singular = |condition| Error::SingularPoint { z, condition };
        let inv = upper_triangular_inverse(&shifted).ok_or(singular(f64::INFINITY))?;
        if inv.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(singular(f64::INFINITY));
        }
        let norm = dmatrix_spectral_norm(&inv);
        let condition = frobenius(&shifted) * norm;
        if !(condition <= SINGULAR_CONDITION) {
            return Err(singular(condition));
        }
        Ok(norm)
    }

    fn sample(&self, z: C64, lambdas: &[C64], kind: Denominator) -> Result<RatioSample> {
        let norm = self.norm_at(z)?;
        Ok(ratio_from(z, norm, lambdas, kind))
    }
}

fn ratio_from(z: C64, norm: f64, lambdas: &[C64], kind: Denominator) -> RatioSample {
    let dist = lambdas.iter().map(|l| (z - l).norm()).fold(f64::INFINITY, f64::min);
    let (denominator, ratio) = if dist.is_finite() { (1.0 / dist, norm * dist) } else { (0.0, f64::INFINITY) };
    RatioSample { z, resolvent_norm: norm, denominator, ratio, denominator_kind: kind }
}

pub fn resolvent_norm(m: &CMatrix, z: C64) -> Result<f64> {
    Resolvent::new(m)?.norm_at(z)
}

/// `(zI − J(λ,k))⁻¹ = Σ_{j<k} (z − λ)^{−(j+1)} N^j`: upper triangular
/// Toeplitz with `(z − λ)^{−(d+1)}` on superdiagonal `d`.
pub fn jordan_resolvent(lambda: C64, k: usize, z: C64) -> Result<CMatrix> {
    if k == 0 {
        return Err(Error::Domain("block size must be positive".into()));
    }
    let w = z - lambda;
    if w.norm() == 0.0 {
        return Err(Error::SingularPoint { z, condition: f64::INFINITY });
    }
    let inv_w = w.inv();
    let mut powers = Vec::with_capacity(k);
    let mut p = inv_w;
    for _ in 0..k {
        powers.push(p);
        p *= inv_w;
    }
    let m = DMatrix::from_fn(k, k, |i, j| if j >= i { powers[j - i] } else { C64::new(0.0, 0.0) });
    CMatrix::new(m)
}

/// Evaluator for the continuous ratio `‖R(z)‖ · min_{λ ∈ σ(M)∖ℍ} |z − λ|`.
#[derive(Debug, Clone)]
pub struct ContinuousRatio {
    pub resolvent: Resolvent,
    pub excluded: Vec<C64>,
}

impl ContinuousRatio {
    pub fn new(m: &CMatrix) -> Result<Self> {
        let report = spectrum(m, default_cluster_tol(m))?;
        Ok(ContinuousRatio { resolvent: Resolvent::new(m)?, excluded: boundary_excluded_spectrum(&report) })
    }

    pub fn at(&self, z: C64) -> Result<RatioSample> {
        if !(z.re > 0.0) {
            return Err(Error::Domain(format!("Re z = {} is not in the open right half-plane", z.re)));
        }
        self.resolvent.sample(z, &self.excluded, Denominator::Excluded)
    }
}

/// Evaluator for the discrete ratio `‖R(z)‖ · min_{λ ∈ σ(M)} |z − λ|`.
#[derive(Debug, Clone)]
pub struct DiscreteRatio {
    pub resolvent: Resolvent,
}

impl DiscreteRatio {
    pub fn new(m: &CMatrix) -> Result<Self> {
        Ok(DiscreteRatio { resolvent: Resolvent::new(m)? })
    }

    pub fn at(&self, z: C64) -> Result<RatioSample> {
        if !(z.norm() > 1.0) {
            return Err(Error::Domain(format!("|z| = {} is not outside the unit disk", z.norm())));
        }
        let r = &self.resolvent;
        r.sample(z, r.eigenvalues(), Denominator::FullSpectrum)
    }
}

/// Continuous ratio with a caller-supplied `σ(M) ∖ ℍ`.
pub fn ratio_continuous(m: &CMatrix, z: C64, excluded_spectrum: &[C64]) -> Result<RatioSample> {
    if !(z.re > 0.0) {
        return Err(Error::Domain(format!("Re z = {} is not in the open right half-plane", z.re)));
    }
    Resolvent::new(m)?.sample(z, excluded_spectrum, Denominator::Excluded)
}

pub fn ratio_discrete(m: &CMatrix, z: C64) -> Result<RatioSample> {
    DiscreteRatio::new(m)?.at(z)
}

/// Numerators of the region tests, one per eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RegionKind {
    /// `|Re λ|`
    HalfPlane,
    /// `1 − |λ|`
    Disk,
}

/// Precomputed eigenvalues for repeated `S(M,r)` / `T(M,r)` tests.
#[derive(Debug, Clone)]
pub struct Regions {
    eigenvalues: Vec<C64>,
    band: f64,
}

impl Regions {
    pub fn new(m: &CMatrix) -> Result<Self> {
        let report = spectrum(m, default_cluster_tol(m))?;
        Ok(Regions { eigenvalues: report.values(), band: report.axis_tolerance })
    }

    pub fn eigenvalues(&self) -> &[C64] {
        &self.eigenvalues
    }

    pub fn in_s(&self, z: C64, r: f64) -> Result<bool> {
        self.member(z, r, RegionKind::HalfPlane)
    }

    pub fn in_t(&self, z: C64, r: f64) -> Result<bool> {
        self.member(z, r, RegionKind::Disk)
    }

    fn member(&self, z: C64, r: f64, kind: RegionKind) -> Result<bool> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("region parameter r = {r} must be positive")));
        }
        let mut worst = f64::NEG_INFINITY;
        for &l in &self.eigenvalues {
            let num = match kind {
                RegionKind::HalfPlane => l.re.abs(),
                RegionKind::Disk => 1.0 - l.norm(),
            };
            let num = if num.abs() <= self.band { 0.0 } else { num };
            let d = (z - l).norm();
            if d <= GRID_SINGULAR_DIST * (1.0 + l.norm()) {
                if num == 0.0 {
                    return Err(Error::SingularPoint { z, condition: f64::INFINITY });
                }
                return Ok(false);
            }
            worst = worst.max(num / d);
        }
        Ok(worst <= 1.0 / r)
    }
}

pub fn region_s_membership(m: &CMatrix, z: C64, r: f64) -> Result<bool> {
    Regions::new(m)?.in_s(z, r)
}

pub fn region_t_membership(m: &CMatrix, z: C64, r: f64) -> Result<bool> {
    Regions::new(m)?.in_t(z, r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellFlag {
    Ok,
    /// Within `GRID_SINGULAR_DIST` of the spectrum, or numerically singular.
    Singular,
    /// `Re z ≤ 0`: norm evaluated, ratio undefined.
    Outside,
}

impl CellFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            CellFlag::Ok => "ok",
            CellFlag::Singular => "singular",
            CellFlag::Outside => "outside",
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridCell {
    pub re: f64,
    pub im: f64,
    pub resolvent_norm: Option<f64>,
    pub ratio: Option<f64>,
    pub flag: CellFlag,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolventGrid {
    pub re_count: usize,
    pub im_count: usize,
    /// Row-major: row = imaginary index, column = real index.
    pub cells: Vec<GridCell>,
}

pub const GRID_CSV_HEADER: &str = "re,im,resolvent_norm,ratio,flag";

impl ResolventGrid {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(GRID_CSV_HEADER);
        out.push('\n');
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        for c in &self.cells {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_f64(c.re),
                fmt_f64(c.im),
                opt(c.resolvent_norm),
                opt(c.ratio),
                c.flag.as_str()
            ));
        }
        out
    }
}

/// Endpoint-inclusive; a single point sits at `lo`.
pub(crate) fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
}

pub fn resolvent_grid(
    m: &CMatrix,
    re_range: (f64, f64),
    im_range: (f64, f64),
    counts: (usize, usize),
) -> Result<ResolventGrid> {
    let (re_count, im_count) = counts;
    if re_count == 0 || im_count == 0 {
        return Err(Error::Domain("grid counts must be positive".into()));
    }
    for v in [re_range.0, re_range.1, im_range.0, im_range.1] {
        if !v.is_finite() {
            return Err(Error::Domain("grid ranges must be finite".into()));
        }
    }
    let eval = ContinuousRatio::new(m)?;
    let res = linspace(re_range.0, re_range.1, re_count);
    let ims = linspace(im_range.0, im_range.1, im_count);
    let points: Vec<C64> = ims.iter().flat_map(|&y| res.iter().map(move |&x| C64::new(x, y))).collect();
    let eigs = eval.resolvent.eigenvalues();
    let cells = points
        .par_iter()
        .map(|&z| {
            let mut cell = GridCell { re: z.re, im: z.im, resolvent_norm: None, ratio: None, flag: CellFlag::Singular };
            if eigs.iter().any(|l| (z - l).norm() <= GRID_SINGULAR_DIST) {
                return cell;
            }
            let Ok(norm) = eval.resolvent.norm_at(z) else {
                return cell;
            };
            cell.resolvent_norm = Some(norm);
            if z.re > 0.0 {
                cell.ratio = Some(ratio_from(z, norm, &eval.excluded, Denominator::Excluded).ratio);
                cell.flag = CellFlag::Ok;
            } else {
                cell.flag = CellFlag::Outside;
            }
            cell
        })
        .collect();
    Ok(ResolventGrid { re_count, im_count, cells })
}
