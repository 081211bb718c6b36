// SPDX-License-Identifier: Apache-2.0

// Discrete-time analogs: power suprema, the discrete Kreiss constant and
// the certificate bound outside the unit disk.

use kreissometer::certificates::{build_condition3, build_condition4, miller_region_bound};
use kreissometer::constants::{calk_discrete, kreiss_constant_discrete, sup_power_norm, SearchConfig};
use kreissometer::{CMatrix, Mode, Result};

pub fn run() -> Result<()> {
    let cfg = SearchConfig::default();
    let cases = [
        ("rotation-like contraction", CMatrix::from_real_rows(&[vec![0.0, 0.9], vec![-0.9, 0.0]])?),
        ("transient growth", CMatrix::from_real_rows(&[vec![0.5, 4.0], vec![0.0, 0.5]])?),
        ("shear", CMatrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]])?),
    ];
    for (name, m) in cases {
        let p = sup_power_norm(&m, &cfg)?;
        let k = kreiss_constant_discrete(&m, &cfg)?;
        let calk = calk_discrete(&m, &cfg)?;
        println!(
            "{name:<26} sup‖M^ν‖ = {:>9.4} (diverged {})  K2 = {:>9.4} (diverged {})  𝒦_d = {:.4}",
            p.value, p.diverged, k.value, k.diverged, calk.value
        );
        let cert = build_condition3(&m, Mode::Discrete, 1.0)?;
        println!("    T(M,1) bound factor {:.3e}", miller_region_bound(&cert, 1.0)?);
        match build_condition4(&m, Mode::Discrete) {
            Ok(c4) => println!("    Stein certificate K4 = {:.3}", c4.k4),
            Err(e) => println!("    Stein certificate unavailable: {e}"),
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
