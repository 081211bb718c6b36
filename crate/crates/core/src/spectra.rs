// SPDX-License-Identifier: Apache-2.0

//! Spectrum extraction, Jordan-structure estimation and the quasi-stability
//! test: `sup_t ‖e^{Mt}‖ < ∞` iff every eigenvalue has `Re λ ≤ 0` and every
//! eigenvalue on the imaginary axis is semisimple.
//!
//! Jordan structure is discontinuous in the matrix entries, so everything
//! here is relative to an explicit tolerance `τ` (relative to `1 + ‖M‖`):
//!
//! * eigenvalues closer than `τ (1 + ‖M‖)` are always clustered;
//! * a candidate cluster of size `m` may additionally absorb eigenvalues
//!   within `(1 + ‖M‖) τ^{1/m}`, the spread a size-`m` Jordan block shows
//!   under a perturbation of relative size `τ`, but only if the ranks of
//!   `(M − λI)^k` confirm an `m`-dimensional generalized eigenspace;
//! * ranks count singular values above `τ ‖M − λI‖^k`.

use serde::Serialize;

use crate::error::Result;
use crate::linalg::{schur, singular_values_desc, spectral_norm, CMatrix, Ordering, C64};

/// Default relative tolerance for clustering, rank decisions and the
/// imaginary-axis band.
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct EigenCluster {
    /// Centroid of the clustered Schur eigenvalues.
    pub value: C64,
    pub algebraic_multiplicity: usize,
    pub max_block_size: usize,
    /// Nullities of `(M − λI)^k`, `k = 1..=multiplicity`.
    pub nullities: Vec<usize>,
    pub members: Vec<C64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub n: usize,
    pub matrix_norm: f64,
    /// Absolute clustering distance.
    pub cluster_tolerance: f64,
    /// Eigenvalues with `|Re λ|` below this are treated as on the axis.
    pub axis_tolerance: f64,
    pub eigenvalues: Vec<EigenCluster>,
    pub abscissa: f64,
    pub radius: f64,
}

impl SpectrumReport {
    /// All Schur eigenvalues, with multiplicity.
    pub fn raw_eigenvalues(&self) -> Vec<C64> {
        self.eigenvalues.iter().flat_map(|c| c.members.iter().copied()).collect()
    }

    pub fn values(&self) -> Vec<C64> {
        self.eigenvalues.iter().map(|c| c.value).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstabilityReason {
    PositiveRealPart,
    DefectiveOnAxis,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub eigenvalue: C64,
    pub reason: InstabilityReason,
    pub block_size: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityVerdict {
    pub quasi_stable: bool,
    pub witness: Option<Witness>,
    pub tolerance: f64,
    pub axis_tolerance: f64,
}

pub fn default_cluster_tol(m: &CMatrix) -> f64 {
    DEFAULT_TOL * (1.0 + spectral_norm(m))
}

pub fn spectrum(m: &CMatrix, cluster_tol: f64) -> Result<SpectrumReport> {
    let n = m.n();
    let norm = spectral_norm(m);
    let scale = 1.0 + norm;
    let tau = (cluster_tol / scale).max(0.0);
    let eig = schur(m, Ordering::DescendingRealPart)?.eigenvalues();

    // Tight single-linkage clusters.
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut owner = vec![usize::MAX; n];
    for i in 0..n {
        if owner[i] != usize::MAX {
            continue;
        }
        let g = groups.len();
        let mut stack = vec![i];
        owner[i] = g;
        let mut members = Vec::new();
        while let Some(a) = stack.pop() {
            members.push(a);
            for b in 0..n {
                if owner[b] == usize::MAX && (eig[a] - eig[b]).norm() <= cluster_tol {
                    owner[b] = g;
                    stack.push(b);
                }
            }
        }
        members.sort_unstable();
        groups.push(members);
    }

    // Rank-validated growth: each seed absorbs its nearest atoms, largest
    // admissible prefix first.
    let mut atoms = groups;
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut used = vec![false; atoms.len()];
    for seed in 0..atoms.len() {
        if used[seed] {
            continue;
        }
        used[seed] = true;
        let mut near: Vec<(f64, usize)> =
            (0..atoms.len()).filter(|&b| !used[b]).map(|b| (linkage(&eig, &atoms[seed], &atoms[b]), b)).collect();
        near.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut chosen = 0;
        for take in (1..=near.len()).rev() {
            let mut merged = atoms[seed].clone();
            for &(_, b) in &near[..take] {
                merged.extend_from_slice(&atoms[b]);
            }
            let size = merged.len();
            let radius = scale * tau.powf(1.0 / size as f64);
            let center = centroid(&eig, &merged);
            if merged.iter().any(|&i| (eig[i] - center).norm() > radius) {
                continue;
            }
            let nul = nullities(m, center, size, tau);
            if nul[0] >= 1 && *nul.last().unwrap() == size {
                chosen = take;
                break;
            }
        }
        let mut merged = std::mem::take(&mut atoms[seed]);
        for &(_, b) in &near[..chosen] {
            used[b] = true;
            merged.extend_from_slice(&atoms[b]);
        }
        merged.sort_unstable();
        groups.push(merged);
    }

    let mut clusters: Vec<EigenCluster> = groups
        .iter()
        .map(|g| {
            let value = centroid(&eig, g);
            let nul = nullities(m, value, g.len(), tau);
            EigenCluster {
                value,
                algebraic_multiplicity: g.len(),
                max_block_size: max_block_from_nullities(&nul),
                nullities: nul,
                members: g.iter().map(|&i| eig[i]).collect(),
            }
        })
        .collect();
    clusters.sort_by(|x, y| y.value.re.total_cmp(&x.value.re).then(x.value.im.total_cmp(&y.value.im)));

    let abscissa = clusters.iter().map(|c| c.value.re).fold(f64::NEG_INFINITY, f64::max);
    let radius = clusters.iter().map(|c| c.value.norm()).fold(0.0, f64::max);
    Ok(SpectrumReport {
        n,
        matrix_norm: norm,
        cluster_tolerance: cluster_tol,
        axis_tolerance: tau * scale,
        eigenvalues: clusters,
        abscissa,
        radius,
    })
}

fn linkage(eig: &[C64], a: &[usize], b: &[usize]) -> f64 {
    a.iter().flat_map(|&i| b.iter().map(move |&j| (eig[i] - eig[j]).norm())).fold(f64::INFINITY, f64::min)
}

fn centroid(eig: &[C64], g: &[usize]) -> C64 {
    g.iter().map(|&i| eig[i]).sum::<C64>() / g.len() as f64
}

/// Numerical nullities of `(M − λI)^k` for `k = 1..=m`.
fn nullities(m: &CMatrix, lambda: C64, mult: usize, tau: f64) -> Vec<usize> {
    let n = m.n();
    let shifted = m.shift(lambda);
    let base = spectral_norm(&shifted);
    let mut power = shifted.clone();
    let mut out = Vec::with_capacity(mult);
    for k in 1..=mult {
        if k > 1 {
            power = power.matmul(&shifted);
        }
        let thresh = tau * base.powi(k as i32);
        let rank = singular_values_desc(power.as_dmatrix()).iter().filter(|&&s| s > thresh).count();
        out.push(n - rank);
    }
    out
}

/// Largest `k` with `d_k > d_{k−1}` (Weyr characteristic still positive).
fn max_block_from_nullities(nul: &[usize]) -> usize {
    let mut prev = 0;
    let mut block = 1;
    for (k, &d) in nul.iter().enumerate() {
        if d > prev {
            block = k + 1;
        }
        prev = prev.max(d);
    }
    block
}

/// Quasi-stability verdict at relative tolerance `tol`.
pub fn classify_quasi_stable(m: &CMatrix, tol: f64) -> Result<StabilityVerdict> {
    let report = spectrum(m, tol * (1.0 + spectral_norm(m)))?;
    Ok(classify_report(&report, tol))
}

pub fn classify_report(report: &SpectrumReport, tol: f64) -> StabilityVerdict {
    let band = tol * (1.0 + report.matrix_norm);
    let mut witness = None;
    for c in &report.eigenvalues {
        if c.value.re > band {
            witness = Some(Witness {
                eigenvalue: c.value,
                reason: InstabilityReason::PositiveRealPart,
                block_size: c.max_block_size,
            });
            break;
        }
        if c.value.re.abs() <= band && c.max_block_size > 1 {
            witness = Some(Witness {
                eigenvalue: c.value,
                reason: InstabilityReason::DefectiveOnAxis,
                block_size: c.max_block_size,
            });
            break;
        }
    }
    StabilityVerdict { quasi_stable: witness.is_none(), witness, tolerance: tol, axis_tolerance: band }
}

/// `σ(M) \ ℍ`: eigenvalues not in the open right half-plane, with the
/// report's axis band counted as on the axis.
pub fn boundary_excluded_spectrum(report: &SpectrumReport) -> Vec<C64> {
    report.eigenvalues.iter().filter(|c| c.value.re <= report.axis_tolerance).map(|c| c.value).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, re};
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec(m: &CMatrix) -> SpectrumReport {
        spectrum(m, default_cluster_tol(m)).unwrap()
    }

    #[test]
    fn diagonal_repeated() {
        let r = spec(&CMatrix::diag_real(&[-1.0, -1.0]));
        assert_eq!(r.eigenvalues.len(), 1);
        assert_eq!(r.eigenvalues[0].algebraic_multiplicity, 2);
        assert_eq!(r.eigenvalues[0].max_block_size, 1);
        assert_eq!(r.abscissa, -1.0);
        assert_eq!(r.radius, 1.0);
    }

    #[test]
    fn nilpotent_block() {
        let r = spec(&CMatrix::jordan(re(0.0), 2));
        assert_eq!(r.eigenvalues.len(), 1);
        assert_eq!(r.eigenvalues[0].algebraic_multiplicity, 2);
        assert_eq!(r.eigenvalues[0].max_block_size, 2);
    }

    #[test]
    fn jordan_three_plus_one() {
        // ranks of (M + I)^k are 2, 1, 0 → nullities 2, 3, 4
        let m = CMatrix::direct_sum(&[CMatrix::jordan(re(-1.0), 3), CMatrix::diag_real(&[-1.0])]);
        let r = spec(&m);
        assert_eq!(r.eigenvalues.len(), 1);
        let cl = &r.eigenvalues[0];
        assert_eq!(cl.algebraic_multiplicity, 4);
        assert_eq!(cl.nullities, vec![2, 3, 4, 4]);
        assert_eq!(cl.max_block_size, 3);
    }

    #[test]
    fn close_but_distinct_normal_eigenvalues_stay_apart() {
        let r = spec(&CMatrix::diag(&[c(0.0, 1.0), c(0.0, 1.0 + 1e-5)]));
        assert_eq!(r.eigenvalues.len(), 2);
        assert!(r.eigenvalues.iter().all(|c| c.max_block_size == 1));
    }

    #[test]
    fn perturbed_jordan_blocks_are_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in 2..=4 {
            let j = CMatrix::direct_sum(&[CMatrix::jordan(c(-0.5, 2.0), k), CMatrix::diag_real(&[-3.0])]);
            let n = j.n();
            let e = DMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let m = CMatrix::new(j.as_dmatrix() + e * re(1e-12)).unwrap();
            let r = spec(&m);
            let big = r.eigenvalues.iter().find(|c| (c.value - c_val()).norm() < 1e-2).unwrap();
            assert_eq!(big.algebraic_multiplicity, k, "k = {k}");
            assert_eq!(big.max_block_size, k, "k = {k}");
        }
        fn c_val() -> C64 {
            c(-0.5, 2.0)
        }
    }

    #[test]
    fn classification_examples() {
        let v = classify_quasi_stable(&CMatrix::diag(&[re(-1.0), c(0.0, 1.0)]), DEFAULT_TOL).unwrap();
        assert!(v.quasi_stable && v.witness.is_none());

        let v = classify_quasi_stable(&CMatrix::jordan(c(0.0, 1.0), 2), DEFAULT_TOL).unwrap();
        assert!(!v.quasi_stable);
        assert_eq!(v.witness.unwrap().reason, InstabilityReason::DefectiveOnAxis);

        let v = classify_quasi_stable(&CMatrix::diag_real(&[0.1]), DEFAULT_TOL).unwrap();
        assert_eq!(v.witness.unwrap().reason, InstabilityReason::PositiveRealPart);

        // interior Jordan blocks are fine
        let v = classify_quasi_stable(&CMatrix::jordan(re(-1.0), 3), DEFAULT_TOL).unwrap();
        assert!(v.quasi_stable);
    }

    #[test]
    fn excluded_spectrum_examples() {
        let ex = |m: CMatrix| boundary_excluded_spectrum(&spec(&m));
        let v = ex(CMatrix::diag(&[re(-1.0), c(0.0, 1.0)]));
        assert_eq!(v.len(), 2);
        assert!(ex(CMatrix::diag_real(&[1.0])).is_empty());
        let v = ex(CMatrix::diag_real(&[-1.0, 2.0]));
        assert_eq!(v, vec![re(-1.0)]);
    }

    #[test]
    fn multiplicities_sum_to_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=9 {
            let m = CMatrix::new(DMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), 0.0))).unwrap();
            let r = spec(&m);
            let total: usize = r.eigenvalues.iter().map(|c| c.algebraic_multiplicity).sum();
            assert_eq!(total, n);
            assert!(r.eigenvalues.iter().all(|c| c.max_block_size <= c.algebraic_multiplicity));
        }
    }
}
