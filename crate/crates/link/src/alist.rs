//! MacKay's alist format for sparse parity-check matrices.
//!
//! ```text
//! N M
//! max_col_weight max_row_weight
//! <N column weights>
//! <M row weights>
//! <N lines: 1-based row indices of each column, zero padded>
//! <M lines: 1-based column indices of each row, zero padded>
//! ```

use std::fmt::Write as _;
use std::path::Path;

use msc_core::gf2::Gf2Matrix;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlistError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("column and row lists disagree at row {row}, column {col}")]
    Inconsistent { row: usize, col: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next_numbers(&mut self) -> Result<Vec<usize>, AlistError> {
        for (i, text) in self.inner.by_ref() {
            self.line = i + 1;
            if text.trim().is_empty() {
                continue;
            }
            return text
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|e| AlistError::Parse { line: i + 1, reason: format!("{t:?}: {e}") }))
                .collect();
        }
        Err(AlistError::Parse { line: self.line + 1, reason: "unexpected end of file".into() })
    }

    fn expect(&mut self, count: usize, what: &str) -> Result<Vec<usize>, AlistError> {
        let v = self.next_numbers()?;
        if v.len() != count {
            return Err(AlistError::Parse { line: self.line, reason: format!("expected {count} {what}, found {}", v.len()) });
        }
        Ok(v)
    }

    fn err(&self, reason: impl Into<String>) -> AlistError {
        AlistError::Parse { line: self.line, reason: reason.into() }
    }
}

pub fn parse_alist(text: &str) -> Result<Gf2Matrix, AlistError> {
    let mut lines = Lines { inner: text.lines().enumerate(), line: 0 };
    let dims = lines.expect(2, "dimensions")?;
    let (n, m) = (dims[0], dims[1]);
    let maxes = lines.expect(2, "maximum weights")?;
    let col_w = lines.expect(n, "column weights")?;
    let row_w = lines.expect(m, "row weights")?;
    if col_w.iter().max().copied().unwrap_or(0) > maxes[0] || row_w.iter().max().copied().unwrap_or(0) > maxes[1] {
        return Err(lines.err("weight exceeds declared maximum"));
    }
    let mut h = Gf2Matrix::zeros(m, n);
    for (c, &w) in col_w.iter().enumerate() {
        let entries = lines.expect(maxes[0], "row indices")?;
        for (slot, &r) in entries.iter().enumerate() {
            match (slot < w, r) {
                (true, 0) => return Err(lines.err("missing row index")),
                (true, r) if r > m => return Err(lines.err(format!("row index {r} out of range"))),
                (true, r) => h.set(r - 1, c, true),
                (false, 0) => {}
                (false, _) => return Err(lines.err("nonzero padding")),
            }
        }
    }
    for (r, &w) in row_w.iter().enumerate() {
        let entries = lines.expect(maxes[1], "column indices")?;
        let mut seen = 0;
        for (slot, &c) in entries.iter().enumerate() {
            match (slot < w, c) {
                (true, 0) => return Err(lines.err("missing column index")),
                (true, c) if c > n => return Err(lines.err(format!("column index {c} out of range"))),
                (true, c) => {
                    if !h.get(r, c - 1) {
                        return Err(AlistError::Inconsistent { row: r, col: c - 1 });
                    }
                    seen += 1;
                }
                (false, 0) => {}
                (false, _) => return Err(lines.err("nonzero padding")),
            }
        }
        if seen != h.row_weight(r) {
            return Err(AlistError::Inconsistent { row: r, col: 0 });
        }
    }
    Ok(h)
}

pub fn write_alist(h: &Gf2Matrix) -> String {
    let (m, n) = (h.rows(), h.cols());
    let cols: Vec<Vec<usize>> = (0..n).map(|c| (0..m).filter(|&r| h.get(r, c)).collect()).collect();
    let rows: Vec<Vec<usize>> = (0..m).map(|r| (0..n).filter(|&c| h.get(r, c)).collect()).collect();
    let max_c = cols.iter().map(Vec::len).max().unwrap_or(0);
    let max_r = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = String::new();
    let join = |v: &mut dyn Iterator<Item = usize>| v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    writeln!(out, "{n} {m}").unwrap();
    writeln!(out, "{max_c} {max_r}").unwrap();
    writeln!(out, "{}", join(&mut cols.iter().map(Vec::len))).unwrap();
    writeln!(out, "{}", join(&mut rows.iter().map(Vec::len))).unwrap();
    for (list, width) in cols.iter().map(|l| (l, max_c)).chain(rows.iter().map(|l| (l, max_r))) {
        let padded = list.iter().map(|&i| i + 1).chain(std::iter::repeat(0)).take(width);
        writeln!(out, "{}", join(&mut padded.into_iter())).unwrap();
    }
    out
}

pub fn read_alist_file(path: &Path) -> Result<Gf2Matrix, AlistError> {
    parse_alist(&std::fs::read_to_string(path)?)
}

pub fn write_alist_file(path: &Path, h: &Gf2Matrix) -> Result<(), AlistError> {
    std::fs::write(path, write_alist(h))?;
    Ok(())
}
