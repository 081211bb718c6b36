// SPDX-License-Identifier: Apache-2.0

//! Serializable reports and the library side of each CLI subcommand.
//!
//! Every `cmd_*` function returns the exact bytes the binary writes, so
//! determinism can be tested without spawning a process. Reports carry no
//! timestamps; struct field order fixes the JSON key order.

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::cauchy::{envelope_comparison, CauchyConfig, EnvelopeComparison, Forcing};
use crate::certificates::{
    bound_from_condition3, build_condition3, build_condition4, miller_region_bound, verify_condition3,
    Condition3Certificate, Condition3Verification, Condition4Certificate,
};
use crate::constants::{
    calk_continuous, calk_discrete, kreiss_constant_continuous, kreiss_constant_discrete, sup_power_norm,
    sup_semigroup_norm, Argmax, SearchConfig, SupSearchResult,
};
use crate::error::Result;
use crate::families::{family_report, generate_family, FamilyReport, FamilySpec};
use crate::io::read_matrix_market;
use crate::linalg::{CMatrix, C64};
use crate::resolvent::{linspace, resolvent_grid, Regions};
use crate::serde_ext::opt_f64_marked;
use crate::spectra::{classify_report, spectrum, SpectrumReport, StabilityVerdict};
use crate::Mode;

pub const SCHEMA: &str = "kreissometer/1";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Region parameters reported with `--certify`.
pub const REGION_RADII: [f64; 3] = [0.5, 1.0, 2.0];

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeOptions {
    pub mode: Mode,
    pub certify: bool,
    pub eps_scaling: f64,
    pub search: SearchConfig,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions { mode: Mode::Continuous, certify: false, eps_scaling: 1.0, search: SearchConfig::default() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InputInfo {
    pub sha256: String,
    pub bytes: usize,
}

impl InputInfo {
    pub fn of(bytes: &[u8]) -> Self {
        InputInfo { sha256: hex::encode(Sha256::digest(bytes)), bytes: bytes.len() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Functionals {
    /// `sup ‖e^{Mt}‖` or `sup ‖M^ν‖`.
    pub k1: SupSearchResult,
    pub k2: SupSearchResult,
    pub calk: SupSearchResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegionBound {
    pub r: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificates {
    pub condition3: Condition3Certificate,
    pub condition3_checks: Condition3Verification,
    /// Continuous mode only.
    #[serde(serialize_with = "opt_f64_marked")]
    pub calk_bound: Option<f64>,
    pub region_bounds: Vec<RegionBound>,
    pub condition4: Option<Condition4Certificate>,
    pub condition4_error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub schema: &'static str,
    pub version: &'static str,
    pub input: InputInfo,
    pub mode: Mode,
    pub spectrum: SpectrumReport,
    pub stability: StabilityVerdict,
    pub functionals: Functionals,
    pub certificates: Option<Certificates>,
    pub config: AnalyzeOptions,
}

pub fn analyze(m: &CMatrix, input: InputInfo, opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    let cfg = &opts.search;
    cfg.validate()?;
    let spec = spectrum(m, cfg.tol * (1.0 + crate::linalg::spectral_norm(m)))?;
    let stability = classify_report(&spec, cfg.tol);

    let (k1, k2) = rayon::join(
        || match opts.mode {
            Mode::Continuous => sup_semigroup_norm(m, cfg),
            Mode::Discrete => sup_power_norm(m, cfg),
        },
        || match opts.mode {
            Mode::Continuous => kreiss_constant_continuous(m, cfg),
            Mode::Discrete => kreiss_constant_discrete(m, cfg),
        },
    );
    let (k1, k2) = (k1?, k2?);
    let mut seeded = cfg.clone();
    if let Argmax::Point { re, im } = k2.argmax {
        seeded.extra_seeds.push(C64::new(re, im));
    }
    let calk = match opts.mode {
        Mode::Continuous => calk_continuous(m, &seeded)?,
        Mode::Discrete => calk_discrete(m, &seeded)?,
    };

    let certificates = if opts.certify { Some(certify(m, opts)?) } else { None };
    Ok(AnalysisReport {
        schema: SCHEMA,
        version: VERSION,
        input,
        mode: opts.mode,
        spectrum: spec,
        stability,
        functionals: Functionals { k1, k2, calk },
        certificates,
        config: opts.clone(),
    })
}

fn certify(m: &CMatrix, opts: &AnalyzeOptions) -> Result<Certificates> {
    let c3 = build_condition3(m, opts.mode, opts.eps_scaling)?;
    let checks = verify_condition3(m, &c3, c3.k31, c3.k32);
    let calk_bound = match opts.mode {
        Mode::Continuous => Some(bound_from_condition3(&c3)?),
        Mode::Discrete => None,
    };
    let region_bounds = REGION_RADII
        .iter()
        .map(|&r| Ok(RegionBound { r, bound: miller_region_bound(&c3, r)? }))
        .collect::<Result<_>>()?;
    let (condition4, condition4_error) = match build_condition4(m, opts.mode) {
        Ok(c) => (Some(c), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(Certificates {
        condition3: c3,
        condition3_checks: checks,
        calk_bound,
        region_bounds,
        condition4,
        condition4_error,
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize infallibly");
    s.push('\n');
    s
}

/// Parses Matrix Market `text` and returns the JSON report.
pub fn cmd_analyze(text: &str, opts: &AnalyzeOptions) -> Result<String> {
    let m = read_matrix_market(text)?;
    Ok(to_json(&analyze(&m, InputInfo::of(text.as_bytes()), opts)?))
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyDocument<'a> {
    pub schema: &'static str,
    pub version: &'static str,
    pub spec: &'a FamilySpec,
    pub search: &'a SearchConfig,
    pub report: &'a FamilyReport,
}

pub fn cmd_family(spec: &FamilySpec, mode: Mode, cfg: &SearchConfig) -> Result<String> {
    let report = family_report(&generate_family(spec)?, mode, cfg)?;
    Ok(to_json(&FamilyDocument { schema: SCHEMA, version: VERSION, spec, search: cfg, report: &report }))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridSpec {
    pub re_range: (f64, f64),
    pub im_range: (f64, f64),
    pub re_count: usize,
    pub im_count: usize,
}

/// Resolvent CSV over the grid.
pub fn cmd_grid(text: &str, grid: &GridSpec) -> Result<String> {
    let m = read_matrix_market(text)?;
    Ok(resolvent_grid(&m, grid.re_range, grid.im_range, (grid.re_count, grid.im_count))?.to_csv())
}

pub const REGION_CSV_HEADER: &str = "re,im,r,region,member";

/// Membership of grid points in `S(M,r)` (continuous) or `T(M,r)`
/// (discrete); points too close to an eigenvalue are marked `singular`.
pub fn cmd_region(text: &str, grid: &GridSpec, r: f64, mode: Mode) -> Result<String> {
    if !(r > 0.0) {
        return Err(crate::Error::Config(format!("region parameter r = {r} must be positive")));
    }
    let m = read_matrix_market(text)?;
    let regions = Regions::new(&m)?;
    let res = linspace(grid.re_range.0, grid.re_range.1, grid.re_count);
    let ims = linspace(grid.im_range.0, grid.im_range.1, grid.im_count);
    let points: Vec<(f64, f64)> = ims.iter().flat_map(|&im| res.iter().map(move |&re| (re, im))).collect();
    let name = match mode {
        Mode::Continuous => "S",
        Mode::Discrete => "T",
    };
    let rows: Vec<String> = points
        .par_iter()
        .map(|&(re, im)| {
            let z = C64::new(re, im);
            let member = match mode {
                Mode::Continuous => regions.in_s(z, r),
                Mode::Discrete => regions.in_t(z, r),
            };
            let flag = match member {
                Ok(true) => "true",
                Ok(false) => "false",
                Err(_) => "singular",
            };
            format!("{re:e},{im:e},{r:e},{name},{flag}")
        })
        .collect();
    let mut out = String::from(REGION_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct CauchySummary<'a> {
    pub schema: &'static str,
    pub version: &'static str,
    pub input: InputInfo,
    pub forcing: &'a Forcing,
    pub config: &'a CauchyConfig,
    pub alpha: f64,
    pub k_old: f64,
    #[serde(serialize_with = "opt_f64_marked")]
    pub k_new: Option<f64>,
    pub new_unavailable: &'a Option<String>,
    pub violation_count: usize,
    /// Fitted over `10² ≤ |y| ≤ 10³` when the grid reaches that far.
    #[serde(serialize_with = "opt_f64_marked")]
    pub new_envelope_slope: Option<f64>,
    pub solution: &'a [crate::cauchy::SolutionRow],
}

/// Artifacts of one Cauchy run.
#[derive(Debug, Clone)]
pub struct CauchyArtifacts {
    pub envelope_csv: String,
    pub solution_csv: String,
    pub summary_json: String,
    pub comparison: EnvelopeComparison,
}

pub fn cmd_cauchy(text: &str, forcing: &Forcing, cfg: &CauchyConfig, search: &SearchConfig) -> Result<CauchyArtifacts> {
    let m = read_matrix_market(text)?;
    let cmp = envelope_comparison(&m, forcing, cfg, search)?;
    let summary = to_json(&CauchySummary {
        schema: SCHEMA,
        version: VERSION,
        input: InputInfo::of(text.as_bytes()),
        forcing,
        config: cfg,
        alpha: cmp.alpha,
        k_old: cmp.k_old,
        k_new: cmp.k_new,
        new_unavailable: &cmp.new_unavailable,
        violation_count: cmp.violations.len(),
        new_envelope_slope: cmp.new_envelope_slope(1e2, 1e3),
        solution: &cmp.solution,
    });
    Ok(CauchyArtifacts {
        envelope_csv: cmp.envelope_csv(),
        solution_csv: cmp.solution_csv(),
        summary_json: summary,
        comparison: cmp,
    })
}
