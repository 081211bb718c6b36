// SPDX-License-Identifier: Apache-2.0

// Writes a resolvent-norm grid as CSV and draws it as a coarse text map.

use kreissometer::linalg::c;
use kreissometer::resolvent::{resolvent_grid, CellFlag};
use kreissometer::{CMatrix, Result};

pub fn run() -> Result<()> {
    let m = CMatrix::from_rows(&[vec![c(-0.3, 1.0), c(5.0, 0.0)], vec![c(0.0, 0.0), c(-0.3, -1.0)]])?;
    let grid = resolvent_grid(&m, (-2.0, 2.0), (-2.0, 2.0), (48, 24))?;
    let path = std::env::temp_dir().join("kreissometer_heatmap.csv");
    std::fs::write(&path, grid.to_csv())?;
    println!("wrote {} cells to {}", grid.cells.len(), path.display());
    let shades = [' ', '.', ':', '-', '=', '+', '*', '#', '%', '@'];
    for row in grid.cells.chunks(grid.re_count).rev() {
        let line: String = row
            .iter()
            .map(|cell| match (cell.flag, cell.resolvent_norm) {
                (CellFlag::Singular, _) | (_, None) => 'X',
                (_, Some(v)) => shades[((v.log10() + 1.0) * 2.5).clamp(0.0, 9.0) as usize],
            })
            .collect();
        println!("|{line}|");
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
