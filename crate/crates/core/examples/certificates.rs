// SPDX-License-Identifier: Apache-2.0

// Builds the scaled-Schur and Lyapunov certificates for one matrix, checks
// the triangular one independently and compares its bound with `𝒦`.

use kreissometer::certificates::{bound_from_condition3, build_condition3, build_condition4, verify_condition3};
use kreissometer::constants::{calk_continuous, SearchConfig};
use kreissometer::linalg::c;
use kreissometer::{CMatrix, Mode, Result};

pub fn run() -> Result<()> {
    let m = CMatrix::from_rows(&[
        vec![c(-0.5, 1.0), c(2.0, 0.0), c(0.0, 0.0)],
        vec![c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 1.0)],
        vec![c(0.0, 0.0), c(0.0, 0.0), c(-0.25, -1.0)],
    ])?;
    let calk = calk_continuous(&m, &SearchConfig::default())?;
    println!("𝒦(M) ≈ {:.4}", calk.value);
    for eps in [1.0, 0.3, 0.1] {
        let cert = build_condition3(&m, Mode::Continuous, eps)?;
        let checks = verify_condition3(&m, &cert, cert.k31, cert.k32);
        println!(
            "ε = {eps:<4} K31 = {:>8.3}  K32 = {:>8.3}  bound = {:>12.4e}  checks passed = {}",
            cert.k31,
            cert.k32,
            bound_from_condition3(&cert)?,
            checks.all_passed
        );
    }
    let c4 = build_condition4(&m, Mode::Continuous)?;
    println!("Lyapunov: K4 = {:.3}, λ_min(H) = {:.3e}, valid = {}", c4.k4, c4.lambda_min, c4.valid);
    match build_condition4(&CMatrix::diag(&[c(0.0, 1.0)]), Mode::Continuous) {
        Err(e) => println!("axis spectrum: {e}"),
        Ok(_) => unreachable!("a purely imaginary eigenvalue admits no strict Lyapunov solution"),
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
