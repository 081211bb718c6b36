// SPDX-License-Identifier: Apache-2.0

// Classifies a few matrices as quasi-stable or not and prints the Jordan
// structure the verdict rests on.

use kreissometer::linalg::c;
use kreissometer::spectra::{classify_quasi_stable, spectrum, DEFAULT_TOL};
use kreissometer::{CMatrix, Result};

pub fn run() -> Result<()> {
    let cases = [
        ("stable diagonal", CMatrix::diag_real(&[-1.0, -0.5])),
        ("semisimple axis pair", CMatrix::diag(&[c(0.0, 1.0), c(0.0, 1.0)])),
        ("axis Jordan block", CMatrix::jordan(c(0.0, 1.0), 2)),
        ("interior Jordan block", CMatrix::jordan(c(-0.2, 0.0), 3)),
        ("unstable", CMatrix::diag_real(&[0.3, -1.0])),
    ];
    for (name, m) in cases {
        let verdict = classify_quasi_stable(&m, DEFAULT_TOL)?;
        let rep = spectrum(&m, DEFAULT_TOL * (1.0 + kreissometer::linalg::spectral_norm(&m)))?;
        println!(
            "{name:<22} quasi-stable = {:<5} witness = {:?}",
            verdict.quasi_stable,
            verdict.witness.map(|w| w.reason)
        );
        for cl in &rep.eigenvalues {
            println!(
                "    λ = {:>8.4}  multiplicity {}  largest block {}  nullities {:?}",
                cl.value, cl.algebraic_multiplicity, cl.max_block_size, cl.nullities
            );
        }
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
