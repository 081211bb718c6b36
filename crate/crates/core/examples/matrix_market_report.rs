// SPDX-License-Identifier: Apache-2.0

// Round-trips a complex matrix through Matrix Market text and prints the
// headline fields of its JSON analysis report.

use kreissometer::io::{read_matrix_market, write_matrix_market};
use kreissometer::linalg::c;
use kreissometer::report::{cmd_analyze, AnalyzeOptions};
use kreissometer::{CMatrix, Result};

pub fn run() -> Result<()> {
    let m = CMatrix::from_rows(&[vec![c(-1.0, 0.5), c(0.25, -2.0)], vec![c(0.0, 0.0), c(0.0, 1.0)]])?;
    let text = write_matrix_market(&m, &["upper triangular, one axis eigenvalue".into()]);
    assert_eq!(read_matrix_market(&text)?, m);
    print!("{text}");
    let opts = AnalyzeOptions { certify: true, ..AnalyzeOptions::default() };
    let json: serde_json::Value = serde_json::from_str(&cmd_analyze(&text, &opts)?).expect("valid JSON");
    println!("input sha256 {}", json["input"]["sha256"]);
    println!("quasi-stable {}", json["stability"]["quasi_stable"]);
    for k in ["k1", "k2", "calk"] {
        println!("{k:>5} = {}", json["functionals"][k]["value"]);
    }
    println!("calK bound {}", json["certificates"]["calk_bound"]);
    println!("Lyapunov {}", json["certificates"]["condition4_error"]);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
