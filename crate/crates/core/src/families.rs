// SPDX-License-Identifier: Apache-2.0

//! Matrix families and family-level uniformity sweeps.
//!
//! A finite sample never proves uniformity over an infinite family, so the
//! verdict is three-valued: `non-uniform` needs a diverged member, `uniform`
//! needs every member bounded with a valid triangular certificate, and a
//! finite but steadily growing parameter sweep is `inconclusive`.

use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certificates::{bound_from_condition3, build_condition3, build_condition4, miller_region_bound};
use crate::constants::{
    calk_continuous, calk_discrete, kreiss_constant_continuous, kreiss_constant_discrete, sup_power_norm,
    sup_semigroup_norm, Argmax, SearchConfig, SupSearchResult,
};
use crate::error::{Error, Result};
use crate::io::read_matrix_market_all;
use crate::linalg::{spectral_norm, CMatrix, C64};
use crate::serde_ext::f64_marked;
use crate::spectra::classify_quasi_stable;
use crate::Mode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    NormalStable,
    RandomShiftedStable,
    DefectiveAxis,
    NearDefective,
    Contraction,
    JordanParade,
    SymbolSampled,
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "normal-stable" => FamilyKind::NormalStable,
            "random-shifted-stable" => FamilyKind::RandomShiftedStable,
            "defective-axis" => FamilyKind::DefectiveAxis,
            "near-defective" => FamilyKind::NearDefective,
            "contraction" => FamilyKind::Contraction,
            "jordan-parade" => FamilyKind::JordanParade,
            "symbol-sampled" => FamilyKind::SymbolSampled,
            other => return Err(Error::Spec(format!("unknown family kind `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub n: usize,
    pub count: usize,
    pub seed: u64,
    /// Distance of the abscissa from the axis for `random-shifted-stable`.
    pub shift_margin: f64,
    /// Member `m` of `near-defective` is `J(iθ − δ/m, n)`.
    pub delta: f64,
    /// Axis position `θ` for `near-defective`.
    pub theta: f64,
    /// Built-in symbol identifier, or `user-table`.
    pub symbol: Option<String>,
    /// Concatenated Matrix Market text for `user-table`.
    #[serde(skip)]
    pub symbol_table: Option<String>,
    pub xi_range: (f64, f64),
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, n: usize, count: usize, seed: u64) -> Self {
        FamilySpec {
            kind,
            n,
            count,
            seed,
            shift_margin: 0.1,
            delta: 0.5,
            theta: 1.0,
            symbol: None,
            symbol_table: None,
            xi_range: (-1.0, 1.0),
        }
    }

    pub fn with_symbol(mut self, id: &str) -> Self {
        self.symbol = Some(id.to_string());
        self
    }
}

#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub index: usize,
    pub label: String,
    /// Sweep parameter (`m` for `near-defective`, `ξ₁` for symbols).
    pub parameter: Option<f64>,
    pub xi: Option<Vec<f64>>,
    pub matrix: std::result::Result<CMatrix, String>,
}

/// Complex standard Gaussian entries.
pub fn complex_gaussian<R: Rng>(rng: &mut R, n: usize) -> DMatrix<C64> {
    DMatrix::from_fn(n, n, |_, _| {
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        C64::new(a, b) / 2f64.sqrt()
    })
}

/// Haar-distributed unitary (QR of a Gaussian with the phases of `R` fixed).
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let qr = complex_gaussian(rng, n).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    CMatrix::new(q).expect("unitary factor is finite")
}

/// `U diag(λ) U*` with `Re λ ∈ [−2, 0]`; roughly a quarter of the
/// eigenvalues sit exactly on the imaginary axis.
pub fn random_normal_stable<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let lambdas: Vec<C64> = (0..n)
        .map(|_| {
            let re = if rng.random_bool(0.25) { 0.0 } else { -rng.random_range(0.05..2.0) };
            C64::new(re, rng.random_range(-2.0..2.0))
        })
        .collect();
    let u = random_unitary(rng, n);
    u.matmul(&CMatrix::diag(&lambdas)).matmul(&u.adjoint())
}

/// Gaussian `G/√n` shifted so that its abscissa is `−margin`.
pub fn random_shifted_stable<R: Rng>(rng: &mut R, n: usize, margin: f64) -> Result<CMatrix> {
    let g = CMatrix::new(complex_gaussian(rng, n) / C64::new((n as f64).sqrt(), 0.0))?;
    let abscissa = crate::linalg::schur(&g, crate::linalg::Ordering::None)?
        .eigenvalues()
        .iter()
        .map(|l| l.re)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(g.shift(C64::new(abscissa + margin, 0.0)))
}

/// `G / ‖G‖`.
pub fn random_contraction<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let g = CMatrix::new(complex_gaussian(rng, n)).expect("gaussian is finite");
    let s = spectral_norm(&g);
    g.scale(C64::new(1.0 / s, 0.0))
}

/// A symbol `ξ ↦ A(ξ)`.
pub type Symbol = Box<dyn Fn(&[f64]) -> Result<CMatrix> + Send + Sync>;

/// Built-in symbols of dimension `n`:
///
/// * `constant`: `−I`
/// * `transport`: `iξ diag(1, …, n)`
/// * `rotation`: `ξ K`, `K` the real skew-symmetric cyclic shift generator
/// * `defective-transport`: `J(iξ, n)`
pub fn builtin_symbol(id: &str, n: usize) -> Result<Symbol> {
    if n == 0 {
        return Err(Error::Spec("symbol dimension must be positive".into()));
    }
    let first = |xi: &[f64]| -> Result<f64> { xi.first().copied().ok_or_else(|| Error::Spec("empty ξ".into())) };
    Ok(match id {
        "constant" => Box::new(move |_: &[f64]| Ok(CMatrix::identity(n).scale(C64::new(-1.0, 0.0)))),
        "transport" => Box::new(move |xi: &[f64]| {
            let x = first(xi)?;
            Ok(CMatrix::diag(&(1..=n).map(|k| C64::new(0.0, x * k as f64)).collect::<Vec<_>>()))
        }),
        "rotation" => Box::new(move |xi: &[f64]| {
            let x = first(xi)?;
            let k = DMatrix::from_fn(n, n, |i, j| {
                if n > 1 && j == (i + 1) % n && i != j {
                    C64::new(x, 0.0)
                } else if n > 1 && i == (j + 1) % n && i != j {
                    C64::new(-x, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            // n = 2 puts both entries at the same positions; symmetrize explicitly
            let k = (&k - k.adjoint()) * C64::new(0.5, 0.0);
            CMatrix::new(k)
        }),
        "defective-transport" => Box::new(move |xi: &[f64]| Ok(CMatrix::jordan(C64::new(0.0, first(xi)?), n))),
        other => return Err(Error::Spec(format!("unknown symbol `{other}`"))),
    })
}

/// `(ξ, A(ξ))` pairs from concatenated Matrix Market text whose blocks carry
/// a `% xi: x₁ x₂ …` comment.
pub fn load_symbol_table(text: &str) -> Result<Vec<(Vec<f64>, CMatrix)>> {
    read_matrix_market_all(text)?
        .into_iter()
        .map(|e| {
            let xi = e
                .comments
                .iter()
                .find_map(|c| c.strip_prefix("xi:"))
                .ok_or_else(|| Error::Parse { line: e.line, column: 1, message: "missing `% xi:` comment".into() })?
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>().map_err(|_| Error::Parse {
                        line: e.line,
                        column: 1,
                        message: format!("bad ξ component `{t}`"),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok((xi, e.matrix))
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SymbolSample {
    pub xi: Vec<f64>,
    pub matrix: std::result::Result<CMatrix, String>,
}

pub fn sample_symbol(symbol: &Symbol, xi_grid: &[Vec<f64>]) -> Vec<SymbolSample> {
    xi_grid.iter().map(|xi| SymbolSample { xi: xi.clone(), matrix: symbol(xi).map_err(|e| e.to_string()) }).collect()
}

fn validate(spec: &FamilySpec) -> Result<()> {
    if spec.count == 0 || spec.n == 0 {
        return Err(Error::Spec("count and n must be positive".into()));
    }
    if spec.kind == FamilyKind::DefectiveAxis && spec.n < 2 {
        return Err(Error::Spec("defective-axis needs n ≥ 2".into()));
    }
    if spec.kind == FamilyKind::NearDefective && !(spec.delta > 0.0) {
        return Err(Error::Spec("near-defective needs δ > 0".into()));
    }
    if spec.kind == FamilyKind::RandomShiftedStable && !(spec.shift_margin >= 0.0) {
        return Err(Error::Spec("shift margin must be nonnegative".into()));
    }
    Ok(())
}

/// Deterministic in `(spec, seed)`.
pub fn generate_family(spec: &FamilySpec) -> Result<Vec<FamilyMember>> {
    validate(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n;
    let member = |index, label: String, parameter, matrix| FamilyMember { index, label, parameter, xi: None, matrix };
    let mut out = Vec::with_capacity(spec.count);
    match spec.kind {
        FamilyKind::SymbolSampled => return symbol_family(spec),
        FamilyKind::NearDefective => {
            for m in 1..=spec.count {
                let lambda = C64::new(-spec.delta / m as f64, spec.theta);
                let label = format!("J({lambda}, {n})");
                out.push(member(m - 1, label, Some(m as f64), Ok(CMatrix::jordan(lambda, n))));
            }
        }
        _ => {
            for i in 0..spec.count {
                let m = match spec.kind {
                    FamilyKind::NormalStable => random_normal_stable(&mut rng, n),
                    FamilyKind::RandomShiftedStable => random_shifted_stable(&mut rng, n, spec.shift_margin)?,
                    FamilyKind::Contraction => random_contraction(&mut rng, n),
                    FamilyKind::DefectiveAxis => {
                        let k = 2 + i % (n - 1);
                        let theta = rng.random_range(-2.0..2.0);
                        let mut blocks = vec![CMatrix::jordan(C64::new(0.0, theta), k)];
                        if n > k {
                            blocks.push(random_normal_stable(&mut rng, n - k));
                        }
                        CMatrix::direct_sum(&blocks)
                    }
                    FamilyKind::JordanParade => {
                        let k = 1 + i % n;
                        let lambda = C64::new(-rng.random_range(0.1..1.0), rng.random_range(-2.0..2.0));
                        let mut blocks = vec![CMatrix::jordan(lambda, k)];
                        if n > k {
                            let rest: Vec<C64> = (0..n - k)
                                .map(|_| C64::new(-rng.random_range(0.1..2.0), rng.random_range(-2.0..2.0)))
                                .collect();
                            blocks.push(CMatrix::diag(&rest));
                        }
                        CMatrix::direct_sum(&blocks)
                    }
                    FamilyKind::SymbolSampled | FamilyKind::NearDefective => unreachable!(),
                };
                out.push(member(i, format!("{}#{i}", kind_name(spec.kind)), None, Ok(m)));
            }
        }
    }
    Ok(out)
}

fn kind_name(kind: FamilyKind) -> String {
    serde_json::to_value(kind).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

fn symbol_family(spec: &FamilySpec) -> Result<Vec<FamilyMember>> {
    let id = spec.symbol.as_deref().ok_or_else(|| Error::Spec("symbol-sampled needs a symbol identifier".into()))?;
    let samples: Vec<SymbolSample> = if id == "user-table" {
        let text = spec.symbol_table.as_deref().ok_or_else(|| Error::Spec("user-table needs a symbol table".into()))?;
        load_symbol_table(text)?
            .into_iter()
            .take(spec.count)
            .map(|(xi, m)| SymbolSample { xi, matrix: Ok(m) })
            .collect()
    } else {
        let symbol = builtin_symbol(id, spec.n)?;
        let grid: Vec<Vec<f64>> = crate::resolvent::linspace(spec.xi_range.0, spec.xi_range.1, spec.count)
            .into_iter()
            .map(|x| vec![x])
            .collect();
        sample_symbol(&symbol, &grid)
    };
    Ok(samples
        .into_iter()
        .enumerate()
        .map(|(index, s)| FamilyMember {
            index,
            label: format!("{id}(ξ = {:?})", s.xi),
            parameter: s.xi.first().copied(),
            xi: Some(s.xi),
            matrix: s.matrix,
        })
        .collect())
}

/// Headline numbers of a [`SupSearchResult`].
#[derive(Debug, Clone, Serialize)]
pub struct FunctionalSummary {
    #[serde(serialize_with = "f64_marked")]
    pub value: f64,
    pub diverged: bool,
    pub unbounded: bool,
    pub certified: bool,
    pub budget_used: usize,
}

impl From<&SupSearchResult> for FunctionalSummary {
    fn from(r: &SupSearchResult) -> Self {
        FunctionalSummary {
            value: r.value,
            diverged: r.diverged,
            unbounded: r.unbounded(),
            certified: r.certified,
            budget_used: r.budget_used,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MemberRecord {
    pub index: usize,
    pub label: String,
    pub parameter: Option<f64>,
    pub xi: Option<Vec<f64>>,
    pub quasi_stable: Option<bool>,
    /// `sup ‖e^{Mt}‖` or `sup ‖M^ν‖`.
    pub k1: Option<FunctionalSummary>,
    pub k2: Option<FunctionalSummary>,
    pub calk: Option<FunctionalSummary>,
    pub k31: Option<f64>,
    #[serde(serialize_with = "crate::serde_ext::opt_f64_marked")]
    pub k32: Option<f64>,
    /// Condition-3 certificate flags all hold.
    pub certificate3_valid: Option<bool>,
    /// Explicit bound on `𝒦` (continuous) or on the `T(M,1)` factor (discrete).
    #[serde(serialize_with = "crate::serde_ext::opt_f64_marked")]
    pub bound: Option<f64>,
    pub k4: Option<f64>,
    pub condition4_error: Option<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Uniformity {
    Uniform,
    NonUniform,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilySuprema {
    #[serde(serialize_with = "f64_marked")]
    pub k1: f64,
    #[serde(serialize_with = "f64_marked")]
    pub k2: f64,
    #[serde(serialize_with = "f64_marked")]
    pub calk: f64,
    #[serde(serialize_with = "f64_marked")]
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyVerdict {
    pub uniformity: Uniformity,
    pub witness: Option<usize>,
    pub reason: String,
    /// No member has an unbounded `K1`.
    pub k1_side_uniform: bool,
    /// No member has an unbounded `𝒦`.
    pub calk_side_uniform: bool,
    /// `(parameter, 𝒦)` along a monotone growth run.
    pub growth_trace: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyReport {
    pub mode: Mode,
    pub member_count: usize,
    pub member_failures: usize,
    pub records: Vec<MemberRecord>,
    pub suprema: FamilySuprema,
    pub verdict: FamilyVerdict,
}

fn analyze_member(member: &FamilyMember, mode: Mode, cfg: &SearchConfig) -> MemberRecord {
    let mut rec = MemberRecord {
        index: member.index,
        label: member.label.clone(),
        parameter: member.parameter,
        xi: member.xi.clone(),
        quasi_stable: None,
        k1: None,
        k2: None,
        calk: None,
        k31: None,
        k32: None,
        certificate3_valid: None,
        bound: None,
        k4: None,
        condition4_error: None,
        error: None,
    };
    let m = match &member.matrix {
        Ok(m) => m,
        Err(e) => {
            rec.error = Some(e.clone());
            return rec;
        }
    };
    if let Err(e) = fill_member(&mut rec, m, mode, cfg) {
        rec.error = Some(e.to_string());
    }
    rec
}

fn fill_member(rec: &mut MemberRecord, m: &CMatrix, mode: Mode, cfg: &SearchConfig) -> Result<()> {
    rec.quasi_stable = Some(classify_quasi_stable(m, cfg.tol)?.quasi_stable);
    let (k1, k2) = match mode {
        Mode::Continuous => (sup_semigroup_norm(m, cfg)?, kreiss_constant_continuous(m, cfg)?),
        Mode::Discrete => (sup_power_norm(m, cfg)?, kreiss_constant_discrete(m, cfg)?),
    };
    let mut seeded = cfg.clone();
    if let Argmax::Point { re, im } = k2.argmax {
        seeded.extra_seeds.push(C64::new(re, im));
    }
    let calk = match mode {
        Mode::Continuous => calk_continuous(m, &seeded)?,
        Mode::Discrete => calk_discrete(m, &seeded)?,
    };
    rec.k1 = Some((&k1).into());
    rec.k2 = Some((&k2).into());
    rec.calk = Some((&calk).into());

    let cert = build_condition3(m, mode, 1.0)?;
    rec.k31 = Some(cert.k31);
    rec.k32 = Some(cert.k32);
    rec.certificate3_valid = Some(cert.ordering_valid && cert.triangular_valid && cert.diagonal_sign_valid);
    rec.bound = Some(match mode {
        Mode::Continuous => bound_from_condition3(&cert)?,
        Mode::Discrete => miller_region_bound(&cert, 1.0)?,
    });
    match build_condition4(m, mode) {
        Ok(c4) => rec.k4 = Some(c4.k4),
        Err(e) => rec.condition4_error = Some(e.to_string()),
    }
    Ok(())
}

/// Minimum ratio of last to first value in a growth run.
const GROWTH_FACTOR: f64 = 2.0;
const GROWTH_MEMBERS: usize = 3;

pub fn family_report(family: &[FamilyMember], mode: Mode, cfg: &SearchConfig) -> Result<FamilyReport> {
    if family.is_empty() {
        return Err(Error::Spec("family is empty".into()));
    }
    cfg.validate()?;
    let mut records: Vec<MemberRecord> = family.par_iter().map(|m| analyze_member(m, mode, cfg)).collect();
    records.sort_by_key(|r| r.index);
    Ok(summarize(records, mode))
}

fn summarize(records: Vec<MemberRecord>, mode: Mode) -> FamilyReport {
    let ok: Vec<&MemberRecord> = records.iter().filter(|r| r.error.is_none()).collect();
    let sup =
        |f: &dyn Fn(&MemberRecord) -> Option<f64>| ok.iter().filter_map(|r| f(r)).fold(f64::NEG_INFINITY, f64::max);
    let value = |s: &Option<FunctionalSummary>| s.as_ref().map(|s| if s.unbounded { f64::INFINITY } else { s.value });
    let suprema = FamilySuprema {
        k1: sup(&|r| value(&r.k1)),
        k2: sup(&|r| value(&r.k2)),
        calk: sup(&|r| value(&r.calk)),
        bound: sup(&|r| r.bound),
    };

    let unbounded = |s: &Option<FunctionalSummary>| s.as_ref().is_some_and(|s| s.unbounded);
    let k1_side_uniform = !ok.iter().any(|r| unbounded(&r.k1));
    let calk_side_uniform = !ok.iter().any(|r| unbounded(&r.calk));

    let mut verdict = FamilyVerdict {
        uniformity: Uniformity::Uniform,
        witness: None,
        reason: String::new(),
        k1_side_uniform,
        calk_side_uniform,
        growth_trace: Vec::new(),
    };
    if ok.is_empty() {
        verdict.uniformity = Uniformity::Inconclusive;
        verdict.reason = "every member failed".into();
    } else if let Some(r) = ok.iter().find(|r| unbounded(&r.calk) || unbounded(&r.k1)) {
        verdict.uniformity = Uniformity::NonUniform;
        verdict.witness = Some(r.index);
        verdict.reason = format!("member {} is unbounded", r.index);
    } else if let Some(trace) = growth_run(&ok) {
        verdict.uniformity = Uniformity::Inconclusive;
        verdict.reason = format!(
            "finite 𝒦 grows monotonically across {} members by a factor {:.3}",
            trace.len(),
            trace.last().unwrap().1 / trace[0].1
        );
        verdict.witness = ok.last().map(|r| r.index);
        verdict.growth_trace = trace;
    } else if let Some(r) = ok.iter().find(|r| r.certificate3_valid != Some(true) || r.k32 == Some(f64::INFINITY)) {
        verdict.uniformity = Uniformity::Inconclusive;
        verdict.witness = Some(r.index);
        verdict.reason = format!("member {} has no valid triangular certificate", r.index);
    } else {
        verdict.reason = "all members bounded with valid certificates".into();
    }

    FamilyReport {
        mode,
        member_count: records.len(),
        member_failures: records.len() - ok.len(),
        suprema,
        verdict,
        records,
    }
}

/// The trailing run of strictly increasing `𝒦`, ordered by parameter.
fn growth_run(ok: &[&MemberRecord]) -> Option<Vec<(f64, f64)>> {
    if ok.iter().any(|r| r.parameter.is_none()) {
        return None;
    }
    let mut pts: Vec<(f64, f64)> = ok.iter().filter_map(|r| Some((r.parameter?, r.calk.as_ref()?.value))).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut start = pts.len().saturating_sub(1);
    while start > 0 && pts[start].1 > pts[start - 1].1 {
        start -= 1;
    }
    let run = &pts[start..];
    (run.len() >= GROWTH_MEMBERS && run.last()?.1 >= GROWTH_FACTOR * run[0].1).then(|| run.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> SearchConfig {
        SearchConfig { grid: 16, refine_iters: 30, ..SearchConfig::default() }
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = FamilySpec::new(FamilyKind::NormalStable, 3, 2, 7);
        let a = generate_family(&spec).unwrap();
        let b = generate_family(&spec).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.matrix, y.matrix);
        }
        let other = generate_family(&FamilySpec::new(FamilyKind::NormalStable, 3, 2, 8)).unwrap();
        assert_ne!(a[0].matrix, other[0].matrix);
    }

    #[test]
    fn kind_contracts() {
        let fam = generate_family(&FamilySpec::new(FamilyKind::DefectiveAxis, 2, 1, 3)).unwrap();
        let m = fam[0].matrix.as_ref().unwrap();
        assert_eq!(m[(0, 1)], C64::new(1.0, 0.0));
        assert_eq!(m[(0, 0)].re, 0.0);
        assert_eq!(m[(0, 0)], m[(1, 1)]);

        for f in generate_family(&FamilySpec::new(FamilyKind::Contraction, 4, 20, 1)).unwrap() {
            assert!(spectral_norm(f.matrix.as_ref().unwrap()) <= 1.0 + 1e-12);
        }
        for f in generate_family(&FamilySpec::new(FamilyKind::RandomShiftedStable, 4, 5, 2)).unwrap() {
            let v = classify_quasi_stable(f.matrix.as_ref().unwrap(), 1e-8).unwrap();
            assert!(v.quasi_stable);
        }
        let near = generate_family(&FamilySpec::new(FamilyKind::NearDefective, 2, 3, 0)).unwrap();
        assert_eq!(near[2].matrix.as_ref().unwrap()[(0, 0)], C64::new(-0.5 / 3.0, 1.0));
        assert!(generate_family(&FamilySpec::new(FamilyKind::DefectiveAxis, 1, 1, 0)).is_err());
        assert!("bogus".parse::<FamilyKind>().is_err());
    }

    #[test]
    fn symbols() {
        let constant = builtin_symbol("constant", 1).unwrap();
        let s = sample_symbol(&constant, &[vec![0.0], vec![1.0], vec![2.0]]);
        assert!(s.iter().all(|x| x.matrix.as_ref().unwrap() == &CMatrix::diag_real(&[-1.0])));
        let rot = builtin_symbol("rotation", 3).unwrap();
        let k = rot(&[0.7]).unwrap();
        assert!(k.add(&k.adjoint()).frobenius_norm() == 0.0);
        assert!(builtin_symbol("nope", 2).is_err());

        let table = format!(
            "{}{}",
            crate::io::write_matrix_market(&CMatrix::diag_real(&[-1.0]), &["xi: 0.5".into()]),
            crate::io::write_matrix_market(&CMatrix::diag_real(&[-2.0]), &["xi: 1.5".into()])
        );
        let t = load_symbol_table(&table).unwrap();
        assert_eq!(t[1].0, vec![1.5]);
    }

    #[test]
    fn normal_family_is_uniform() {
        let fam = generate_family(&FamilySpec::new(FamilyKind::NormalStable, 3, 4, 11)).unwrap();
        let r = family_report(&fam, Mode::Continuous, &quick()).unwrap();
        assert_eq!(r.verdict.uniformity, Uniformity::Uniform, "{:?}", r.verdict);
        assert!((r.suprema.calk - 1.0).abs() < 1e-3);
        assert!(r.verdict.k1_side_uniform && r.verdict.calk_side_uniform);
    }

    #[test]
    fn defective_symbol_is_non_uniform() {
        let spec = FamilySpec::new(FamilyKind::SymbolSampled, 2, 3, 0).with_symbol("defective-transport");
        let r = family_report(&generate_family(&spec).unwrap(), Mode::Continuous, &quick()).unwrap();
        assert_eq!(r.verdict.uniformity, Uniformity::NonUniform);
        assert!(!r.verdict.k1_side_uniform && !r.verdict.calk_side_uniform);
    }

    #[test]
    fn near_defective_grows() {
        let mut spec = FamilySpec::new(FamilyKind::NearDefective, 2, 5, 0);
        spec.theta = 0.0;
        spec.delta = 1.0;
        let r = family_report(&generate_family(&spec).unwrap(), Mode::Continuous, &quick()).unwrap();
        assert_eq!(r.verdict.uniformity, Uniformity::Inconclusive, "{:?}", r.verdict);
        let vals: Vec<f64> = r.records.iter().map(|x| x.calk.as_ref().unwrap().value).collect();
        assert!(vals.windows(2).all(|w| w[1] > w[0]), "{vals:?}");
        assert!(r.verdict.k1_side_uniform && r.verdict.calk_side_uniform);
    }
}
