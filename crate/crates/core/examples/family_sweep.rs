// SPDX-License-Identifier: Apache-2.0

// Three family sweeps with the three possible verdicts.

use kreissometer::constants::SearchConfig;
use kreissometer::families::{family_report, generate_family, FamilyKind, FamilySpec};
use kreissometer::{Mode, Result};

pub fn run() -> Result<()> {
    let cfg = SearchConfig { grid: 16, refine_iters: 30, ..SearchConfig::default() };
    let mut near = FamilySpec::new(FamilyKind::NearDefective, 2, 6, 0);
    near.theta = 0.0;
    let specs = [
        FamilySpec::new(FamilyKind::NormalStable, 4, 6, 7),
        near,
        FamilySpec::new(FamilyKind::SymbolSampled, 2, 5, 0).with_symbol("defective-transport"),
    ];
    for spec in specs {
        let rep = family_report(&generate_family(&spec)?, Mode::Continuous, &cfg)?;
        println!(
            "{:?}: {:?} ({}); sup K1 = {:.3e}, sup 𝒦 = {:.3e}",
            spec.kind, rep.verdict.uniformity, rep.verdict.reason, rep.suprema.k1, rep.suprema.calk
        );
        for (p, v) in &rep.verdict.growth_trace {
            println!("    m = {p}: 𝒦 = {v:.3}");
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
