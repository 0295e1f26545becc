//! MatrixMarket `coordinate real general` files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub const HEADER: &str = "%%MatrixMarket matrix coordinate real general";

/// Non-zeros of a dense matrix as `(row, col, value)`, row-major.
pub fn dense_triplets(m: &DMatrix<f64>) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let v = m[(r, c)];
            if v != 0.0 {
                out.push((r, c, v));
            }
        }
    }
    out
}

/// Renders entries (0-based, any order) with 1-based indices sorted by `(row, col)`.
pub fn render(rows: usize, cols: usize, entries: &[(usize, usize, f64)]) -> String {
    let mut sorted = entries.to_vec();
    sorted.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    let mut out = String::with_capacity(32 * (sorted.len() + 2));
    out.push_str(HEADER);
    out.push('\n');
    let _ = writeln!(out, "{rows} {cols} {}", sorted.len());
    for (r, c, v) in sorted {
        let _ = writeln!(out, "{} {} {:.16e}", r + 1, c + 1, v);
    }
    out
}

pub fn write(path: &Path, rows: usize, cols: usize, entries: &[(usize, usize, f64)]) -> Result<()> {
    fs::write(path, render(rows, cols, entries))?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Coordinate {
    pub rows: usize,
    pub cols: usize,
    /// 0-based `(row, col, value)`.
    pub entries: Vec<(usize, usize, f64)>,
}

impl Coordinate {
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }
}

fn bad(path: &Path, line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Schema {
        path: path.to_path_buf(),
        msg: format!("line {line}: {msg}"),
    }
}

pub fn parse(path: &Path, text: &str) -> Result<Coordinate> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, l)) if l.trim().eq_ignore_ascii_case(HEADER) => {}
        _ => return Err(bad(path, 1, "expected a coordinate real general header")),
    }
    let mut lines = lines.filter(|(_, l)| !l.starts_with('%') && !l.trim().is_empty());
    let (n, size) = lines.next().ok_or_else(|| bad(path, 2, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(str::parse)
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| bad(path, n, e))?;
    let [rows, cols, nnz] = dims[..] else {
        return Err(bad(path, n, "size line needs three integers"));
    };
    let mut entries = Vec::with_capacity(nnz);
    for (n, line) in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(bad(path, n, "entry needs row, column and value"));
        }
        let r: usize = parts[0].parse().map_err(|e| bad(path, n, e))?;
        let c: usize = parts[1].parse().map_err(|e| bad(path, n, e))?;
        let v: f64 = parts[2].parse().map_err(|e| bad(path, n, e))?;
        if r == 0 || c == 0 || r > rows || c > cols {
            return Err(bad(path, n, format!("index ({r}, {c}) outside {rows}x{cols}")));
        }
        entries.push((r - 1, c - 1, v));
    }
    if entries.len() != nnz {
        return Err(bad(path, 2, format!("declared {nnz} entries, found {}", entries.len())));
    }
    Ok(Coordinate { rows, cols, entries })
}

pub fn read(path: &Path) -> Result<Coordinate> {
    parse(path, &fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_sorts_and_uses_one_based_indices() {
        let text = render(2, 2, &[(1, 0, -0.5), (0, 1, 0.25)]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], HEADER);
        assert_eq!(lines[1], "2 2 2");
        assert_eq!(lines[2], "1 2 2.5000000000000000e-1");
        assert_eq!(lines[3], "2 1 -5.0000000000000000e-1");
    }

    #[test]
    fn parse_round_trip() {
        let m = DMatrix::from_row_slice(2, 3, &[0.0, 1.0 / 3.0, 0.0, -2e-7, 0.0, 5.0]);
        let text = render(2, 3, &dense_triplets(&m));
        let back = parse(Path::new("mem"), &text).unwrap().to_dense();
        assert_eq!(back, m);
    }

    #[test]
    fn parse_errors_carry_line() {
        let err = parse(Path::new("x.mtx"), &format!("{HEADER}\n2 2 1\n3 1 1.0\n")).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        assert!(parse(Path::new("x.mtx"), "garbage").is_err());
        assert!(parse(Path::new("x.mtx"), &format!("{HEADER}\n2 2 2\n1 1 1.0\n")).is_err());
    }
}
