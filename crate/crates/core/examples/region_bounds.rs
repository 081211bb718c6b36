// SPDX-License-Identifier: Apache-2.0

// Samples the region `S(M, r)` for a non-normal matrix with eigenvalues on
// both sides of the axis and checks the resolvent bound there.

use kreissometer::certificates::{build_condition3, check_resolvent_inequality, miller_region_bound};
use kreissometer::linalg::c;
use kreissometer::resolvent::{Denominator, Regions};
use kreissometer::{CMatrix, Mode, Result, C64};

pub fn run() -> Result<()> {
    let m = CMatrix::from_rows(&[vec![c(0.5, 0.0), c(3.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 1.0)]])?;
    let cert = build_condition3(&m, Mode::Continuous, 1.0)?;
    let regions = Regions::new(&m)?;
    for r in [0.5, 1.0, 2.0] {
        let samples: Vec<C64> = (0..80)
            .flat_map(|i| (0..80).map(move |j| c(-4.0 + 0.1 * i as f64, -4.0 + 0.1 * j as f64)))
            .filter(|&z| regions.in_s(z, r) == Ok(true))
            .collect();
        let bound = miller_region_bound(&cert, r)?;
        let rep = check_resolvent_inequality(&m, bound, &samples, Denominator::FullSpectrum)?;
        println!(
            "r = {r}: {} grid points in S(M,r), bound factor {:.3e}, violations {}, tightest relative slack {:.3}",
            rep.checked,
            bound,
            rep.violations.len(),
            rep.min_relative_slack
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
