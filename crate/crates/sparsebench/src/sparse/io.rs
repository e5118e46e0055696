//! Matrix text exchange format.
//!
//! Line 1 holds `n_rows n_cols nnz`, followed by `nnz` lines of
//! `row col value` with 0-based indices. Values are written in round-trip
//! decimal so read-after-write reproduces them bit for bit. Lines starting
//! with `%` are comments.

use super::{CooTriplets, CsrMatrix, SparseError};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MatrixIoError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Sparse(#[from] SparseError),
}

pub fn write_matrix(a: &CsrMatrix, path: &Path) -> Result<(), MatrixIoError> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    writeln!(w, "{} {} {}", a.n_rows(), a.n_cols(), a.nnz())?;
    for i in 0..a.n_rows() {
        let (cols, vals) = a.row(i);
        for (c, v) in cols.iter().zip(vals) {
            writeln!(w, "{} {} {}", i, c, v)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_matrix(path: &Path) -> Result<CsrMatrix, MatrixIoError> {
    let file = std::fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut header: Option<(usize, usize, usize)> = None;
    let mut triplets = CooTriplets::new(0, 0);
    let mut seen = 0usize;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        if header.is_none() {
            let n_rows = parse_field(fields.next(), line_no, "n_rows")?;
            let n_cols = parse_field(fields.next(), line_no, "n_cols")?;
            let nnz = parse_field(fields.next(), line_no, "nnz")?;
            header = Some((n_rows, n_cols, nnz));
            triplets = CooTriplets::new(n_rows, n_cols);
            continue;
        }
        let row: usize = parse_field(fields.next(), line_no, "row")?;
        let col: usize = parse_field(fields.next(), line_no, "col")?;
        let value: f64 = parse_field(fields.next(), line_no, "value")?;
        triplets.push(row, col, value);
        seen += 1;
    }
    let (_, _, nnz) = header.ok_or(MatrixIoError::Parse {
        line: 0,
        message: "missing header line".into(),
    })?;
    if seen != nnz {
        return Err(MatrixIoError::Parse {
            line: 0,
            message: format!("header promised {nnz} entries, found {seen}"),
        });
    }
    Ok(triplets.to_csr()?)
}

fn parse_field<T: std::str::FromStr>(
    field: Option<&str>,
    line: usize,
    name: &str,
) -> Result<T, MatrixIoError> {
    let raw = field.ok_or_else(|| MatrixIoError::Parse {
        line,
        message: format!("missing field `{name}`"),
    })?;
    raw.parse().map_err(|_| MatrixIoError::Parse {
        line,
        message: format!("cannot parse `{raw}` as {name}"),
    })
}
