//! Plain-text matrix exchange: comma-separated values, one matrix row per
//! line, `.` as decimal separator. Lines starting with `#` are metadata and
//! are skipped on input.

use std::io::{BufRead, Write};

use super::{Matrix, SymMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Reads a numeric table, skipping blank and `#` lines. Errors carry the
/// 1-based line number.
pub fn read_table<R: BufRead>(reader: R) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let row = t
            .split(',')
            .map(|f| {
                f.trim().parse::<f64>().map_err(|e| Error::Parse {
                    line: n + 1,
                    message: format!("bad number {:?}: {e}", f.trim()),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first().map(Vec::len) {
            if row.len() != first {
                return Err(Error::Parse {
                    line: n + 1,
                    message: format!("expected {first} columns, found {}", row.len()),
                });
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn read_matrix<T: Real, R: BufRead>(reader: R) -> Result<Matrix<T>> {
    let rows = read_table(reader)?;
    let conv: Vec<Vec<T>> = rows
        .into_iter()
        .map(|r| r.into_iter().map(T::lit).collect())
        .collect();
    Matrix::from_rows(&conv)
}

/// Reads a `d × d` symmetric matrix; asymmetry beyond tolerance is an error.
pub fn read_sym_matrix<T: Real, R: BufRead>(reader: R) -> Result<SymMatrix<T>> {
    SymMatrix::new(read_matrix(reader)?)
}

pub fn write_matrix<T: Real, W: Write>(
    mut w: W,
    m: &Matrix<T>,
    metadata: &[String],
) -> Result<()> {
    for line in metadata {
        writeln!(w, "# {line}")?;
    }
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|v| format!("{v:e}")).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let m = SymMatrix::from_rows(&[vec![2.0, 0.1], vec![0.1, 1.0 / 3.0]]).unwrap();
        let mut buf = Vec::new();
        write_matrix(&mut buf, m.as_matrix(), &["d=2".into()]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# d=2\n"));
        let back: SymMatrix<f64> = read_sym_matrix(&buf[..]).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn ragged_rows_report_line() {
        let text = "# header\n1,2\n3\n";
        match read_table(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }
}
