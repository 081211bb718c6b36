// SPDX-License-Identifier: Apache-2.0

// Solves `u' = A u + 1` through the inverse Laplace contour and compares the
// constant classical envelope with the decaying spectrum-relative one.

use kreissometer::cauchy::{envelope_comparison, CauchyConfig, Forcing, Profile};
use kreissometer::constants::SearchConfig;
use kreissometer::linalg::c;
use kreissometer::{CMatrix, Result};

pub fn run() -> Result<()> {
    let a = CMatrix::from_rows(&[vec![c(-1.0, 0.0), c(4.0, 0.0)], vec![c(0.0, 0.0), c(-0.5, 2.0)]])?;
    let cfg = CauchyConfig { y_max: 1e3, y_count: 40_001, t_eval: vec![0.5, 1.0, 2.0], ..CauchyConfig::default() };
    let cmp = envelope_comparison(&a, &Forcing::uniform(Profile::Constant, 2), &cfg, &SearchConfig::default())?;
    println!("α = {:.3}, K_old = {:.4}, K_new = {:?}", cmp.alpha, cmp.k_old, cmp.k_new);
    for y in [0.0, 10.0, 100.0, 1000.0] {
        let row = cmp.rows.iter().min_by(|a, b| (a.y - y).abs().total_cmp(&(b.y - y).abs())).unwrap();
        println!(
            "y = {:>7.1}: ‖R‖ = {:.3e}  old = {:.3e}  new = {:.3e}",
            row.y,
            row.true_norm,
            row.old_envelope,
            row.new_envelope.unwrap_or(f64::NAN)
        );
    }
    println!("new-envelope slope on 10² ≤ |y| ≤ 10³: {:.4}", cmp.new_envelope_slope(1e2, 1e3).unwrap_or(f64::NAN));
    for s in &cmp.solution {
        println!("t = {} component {}: |contour − Duhamel| = {:.2e}", s.t, s.component, s.abs_error);
    }
    println!("envelope violations: {}", cmp.violations.len());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
