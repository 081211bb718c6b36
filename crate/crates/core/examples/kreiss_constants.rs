// SPDX-License-Identifier: Apache-2.0

// The three suprema for a non-normal stable matrix. The ordering
// `K2 ≤ 𝒦` and the growth of `sup ‖e^{Mt}‖` with non-normality are the
// point of the demo.

use kreissometer::constants::{calk_continuous, kreiss_constant_continuous, sup_semigroup_norm, Argmax, SearchConfig};
use kreissometer::linalg::c;
use kreissometer::{CMatrix, Result};

pub fn run() -> Result<()> {
    let cfg = SearchConfig::default();
    for coupling in [0.0, 1.0, 10.0, 100.0] {
        let m = CMatrix::from_rows(&[vec![c(-1.0, 0.0), c(coupling, 0.0)], vec![c(0.0, 0.0), c(-2.0, 0.0)]])?;
        let k1 = sup_semigroup_norm(&m, &cfg)?;
        let k2 = kreiss_constant_continuous(&m, &cfg)?;
        let mut seeded = cfg.clone();
        if let Argmax::Point { re, im } = k2.argmax {
            seeded.extra_seeds.push(c(re, im));
        }
        let calk = calk_continuous(&m, &seeded)?;
        println!(
            "coupling {coupling:>6}: sup‖e^Mt‖ = {:>9.4}  K2 = {:>9.4}  𝒦 = {:>9.4}  (evaluations {})",
            k1.value,
            k2.value,
            calk.value,
            k1.budget_used + k2.budget_used + calk.budget_used
        );
    }
    let axis = CMatrix::jordan(c(0.0, 0.5), 2);
    let r = calk_continuous(&axis, &cfg)?;
    let g = r.growth().expect("divergence carries a growth certificate");
    println!("J(0.5i, 2): diverged = {}, log-slope along the approach = {:.3}", r.diverged, g.log_slope);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
