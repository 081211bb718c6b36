// SPDX-License-Identifier: Apache-2.0

//! Matrix Market reader and writer.
//!
//! Accepted headers: `%%MatrixMarket matrix {array|coordinate}
//! {real|integer|complex} {general|symmetric|skew-symmetric|hermitian}`.
//! Real and integer inputs are promoted to complex. Several matrices may be
//! concatenated in one file; comment lines preceding each size line are kept.
//! Errors carry 1-based line and column numbers.

use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Array,
    Coordinate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

/// One matrix from a (possibly concatenated) Matrix Market stream.
#[derive(Debug, Clone)]
pub struct MarketEntry {
    /// Comment lines after the banner, without the leading `%`.
    pub comments: Vec<String>,
    pub matrix: CMatrix,
    /// Line of the banner.
    pub line: usize,
}

fn perr(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in s.char_indices() {
        if ch.is_whitespace() {
            if let Some(b) = start.take() {
                out.push((b, &s[b..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(b) = start {
        out.push((b, &s[b..]));
    }
    out.into_iter().map(|(b, t)| (s[..b].chars().count() + 1, t)).collect()
}

fn parse_header(line_no: usize, line: &str) -> Result<(Layout, Field, Symmetry)> {
    let toks = tokens(line);
    if toks.len() != 5 {
        return Err(perr(line_no, 1, "banner must have five fields"));
    }
    let word = |i: usize| toks[i].1.to_ascii_lowercase();
    if word(1) != "matrix" {
        return Err(perr(line_no, toks[1].0, format!("unsupported object `{}`", toks[1].1)));
    }
    let layout = match word(2).as_str() {
        "array" => Layout::Array,
        "coordinate" => Layout::Coordinate,
        _ => return Err(perr(line_no, toks[2].0, format!("unsupported format `{}`", toks[2].1))),
    };
    let field = match word(3).as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "complex" => Field::Complex,
        _ => return Err(perr(line_no, toks[3].0, format!("unsupported field `{}`", toks[3].1))),
    };
    let symmetry = match word(4).as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        "hermitian" => Symmetry::Hermitian,
        _ => return Err(perr(line_no, toks[4].0, format!("unsupported symmetry `{}`", toks[4].1))),
    };
    if symmetry == Symmetry::Hermitian && field != Field::Complex {
        return Err(perr(line_no, toks[4].0, "hermitian requires the complex field"));
    }
    Ok((layout, field, symmetry))
}

fn parse_usize(line: usize, (col, tok): (usize, &str)) -> Result<usize> {
    tok.parse().map_err(|_| perr(line, col, format!("expected a nonnegative integer, found `{tok}`")))
}

fn parse_f64(line: usize, (col, tok): (usize, &str)) -> Result<f64> {
    let v: f64 = tok.parse().map_err(|_| perr(line, col, format!("expected a number, found `{tok}`")))?;
    if !v.is_finite() {
        return Err(perr(line, col, format!("non-finite value `{tok}`")));
    }
    Ok(v)
}

fn parse_value(line: usize, toks: &[(usize, &str)], field: Field) -> Result<C64> {
    match field {
        Field::Complex => Ok(C64::new(parse_f64(line, toks[0])?, parse_f64(line, toks[1])?)),
        Field::Real => Ok(C64::new(parse_f64(line, toks[0])?, 0.0)),
        Field::Integer => {
            let (col, tok) = toks[0];
            let v: i64 = tok.parse().map_err(|_| perr(line, col, format!("expected an integer, found `{tok}`")))?;
            Ok(C64::new(v as f64, 0.0))
        }
    }
}

fn mirror(v: C64, sym: Symmetry) -> C64 {
    match sym {
        Symmetry::General | Symmetry::Symmetric => v,
        Symmetry::SkewSymmetric => -v,
        Symmetry::Hermitian => v.conj(),
    }
}

/// Parses every matrix in `text`.
pub fn read_matrix_market_all(text: &str) -> Result<Vec<MarketEntry>> {
    let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let (no, line) = lines[i];
        if line.trim().is_empty() {
            i += 1;
            continue;
        }
        if !line.starts_with("%%MatrixMarket") {
            return Err(perr(no, 1, "expected a `%%MatrixMarket` banner"));
        }
        let (layout, field, sym) = parse_header(no, line)?;
        let banner = no;
        i += 1;

        let mut comments = Vec::new();
        while i < lines.len() {
            let l = lines[i].1;
            if let Some(c) = l.strip_prefix('%') {
                if l.starts_with("%%MatrixMarket") {
                    break;
                }
                comments.push(c.trim().to_string());
            } else if !l.trim().is_empty() {
                break;
            }
            i += 1;
        }
        let Some(&(size_no, size_line)) = lines.get(i) else {
            return Err(perr(lines.len().max(1), 1, "missing size line"));
        };
        if size_line.starts_with('%') {
            return Err(perr(size_no, 1, "missing size line"));
        }
        let st = tokens(size_line);
        let want = if layout == Layout::Array { 2 } else { 3 };
        if st.len() != want {
            return Err(perr(size_no, 1, format!("size line needs {want} integers")));
        }
        let rows = parse_usize(size_no, st[0])?;
        let cols = parse_usize(size_no, st[1])?;
        if rows == 0 || cols == 0 {
            return Err(Error::Empty);
        }
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        let n = rows;
        i += 1;

        let width = if field == Field::Complex { 2 } else { 1 };
        let mut data = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
        // data lines, skipping blanks and comments
        let next_data = |i: &mut usize| -> Option<(usize, &str)> {
            while *i < lines.len() {
                let (no, l) = lines[*i];
                if l.starts_with("%%MatrixMarket") {
                    return None;
                }
                *i += 1;
                if l.trim().is_empty() || l.starts_with('%') {
                    continue;
                }
                return Some((no, l));
            }
            None
        };
        match layout {
            Layout::Array => {
                let cells: Vec<(usize, usize)> = if sym == Symmetry::General {
                    (0..n).flat_map(|j| (0..n).map(move |r| (r, j))).collect()
                } else {
                    let skip_diag = sym == Symmetry::SkewSymmetric;
                    (0..n).flat_map(|j| ((if skip_diag { j + 1 } else { j })..n).map(move |r| (r, j))).collect()
                };
                for (r, c) in cells {
                    let (no, l) = next_data(&mut i).ok_or_else(|| perr(lines.len().max(1), 1, "too few entries"))?;
                    let t = tokens(l);
                    if t.len() != width {
                        return Err(perr(no, 1, format!("expected {width} value(s) per line")));
                    }
                    let v = parse_value(no, &t, field)?;
                    data[(r, c)] = v;
                    if r != c && sym != Symmetry::General {
                        data[(c, r)] = mirror(v, sym);
                    }
                }
            }
            Layout::Coordinate => {
                let nnz = parse_usize(size_no, st[2])?;
                for _ in 0..nnz {
                    let (no, l) = next_data(&mut i).ok_or_else(|| perr(lines.len().max(1), 1, "too few entries"))?;
                    let t = tokens(l);
                    if t.len() != 2 + width {
                        return Err(perr(no, 1, format!("expected 2 indices and {width} value(s)")));
                    }
                    let r = parse_usize(no, t[0])?;
                    let c = parse_usize(no, t[1])?;
                    if r == 0 || r > n {
                        return Err(perr(no, t[0].0, format!("row index {r} out of range 1..={n}")));
                    }
                    if c == 0 || c > n {
                        return Err(perr(no, t[1].0, format!("column index {c} out of range 1..={n}")));
                    }
                    let v = parse_value(no, &t[2..], field)?;
                    let (r, c) = (r - 1, c - 1);
                    if sym != Symmetry::General && r < c {
                        return Err(perr(no, t[0].0, "symmetric storage expects the lower triangle"));
                    }
                    data[(r, c)] += v;
                    if r != c && sym != Symmetry::General {
                        data[(c, r)] += mirror(v, sym);
                    }
                }
            }
        }
        // anything left before the next banner is an error
        while i < lines.len() && !lines[i].1.starts_with("%%MatrixMarket") {
            let (no, l) = lines[i];
            if !(l.trim().is_empty() || l.starts_with('%')) {
                return Err(perr(no, 1, "unexpected data after the last entry"));
            }
            i += 1;
        }
        out.push(MarketEntry { comments, matrix: CMatrix::new(data)?, line: banner });
    }
    if out.is_empty() {
        return Err(perr(1, 1, "empty input"));
    }
    Ok(out)
}

/// Parses exactly one matrix.
pub fn read_matrix_market(text: &str) -> Result<CMatrix> {
    let mut all = read_matrix_market_all(text)?;
    if all.len() != 1 {
        return Err(perr(all[1].line, 1, "expected a single matrix"));
    }
    Ok(all.remove(0).matrix)
}

pub fn read_matrix_market_file(path: &Path) -> Result<CMatrix> {
    read_matrix_market(&std::fs::read_to_string(path)?)
}

/// `array complex general`, 17 significant digits, with optional comments.
pub fn write_matrix_market(m: &CMatrix, comments: &[String]) -> String {
    let n = m.n();
    let mut s = String::from("%%MatrixMarket matrix array complex general\n");
    for c in comments {
        s.push_str(&format!("% {c}\n"));
    }
    s.push_str(&format!("{n} {n}\n"));
    for j in 0..n {
        for i in 0..n {
            let v = m[(i, j)];
            s.push_str(&format!("{:.16e} {:.16e}\n", v.re, v.im));
        }
    }
    s
}
