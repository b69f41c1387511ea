//! On-disk formats: Matrix Market coordinate files and CSV tables.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use sgmor_core::sparse::CsrMatrix;
use sgmor_core::DMatrix;

use crate::error::{CliError, Result};

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Lower triangle of a symmetric matrix, 1-based.
pub fn write_symmetric_mtx<W: Write>(mut w: W, m: &CsrMatrix) -> io::Result<()> {
    if m.nrows() != m.ncols() || !m.is_symmetric() {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "matrix is not symmetric"));
    }
    let lower: Vec<_> = m.iter().filter(|&(i, j, _)| i >= j).collect();
    writeln!(w, "%%MatrixMarket matrix coordinate real symmetric")?;
    writeln!(w, "{} {} {}", m.nrows(), m.ncols(), lower.len())?;
    for (i, j, v) in lower {
        writeln!(w, "{} {} {}", i + 1, j + 1, fmt_f64(v))?;
    }
    Ok(())
}

/// Nonzeros of a dense matrix, 1-based, column-major order.
pub fn write_general_mtx<W: Write>(mut w: W, m: &DMatrix<f64>) -> io::Result<()> {
    let mut entries = Vec::new();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if m[(i, j)] != 0.0 {
                entries.push((i, j, m[(i, j)]));
            }
        }
    }
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", m.nrows(), m.ncols(), entries.len())?;
    for (i, j, v) in entries {
        writeln!(w, "{} {} {}", i + 1, j + 1, fmt_f64(v))?;
    }
    Ok(())
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

pub fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> Result<()> {
    let mut w = create(path)?;
    f(&mut w).and_then(|_| w.flush()).map_err(|e| CliError::io(path, e))
}

/// Writes `header` and `rows` as CSV.
pub fn write_csv<R, I>(path: &Path, header: &[&str], rows: R) -> Result<()>
where
    R: IntoIterator<Item = I>,
    I: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(header).map_err(|e| CliError::csv(path, e))?;
    for row in rows {
        w.write_record(row.into_iter().collect::<Vec<_>>()).map_err(|e| CliError::csv(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Header and rows of a CSV file as strings.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::csv(path, e))?;
    let header = r.headers().map_err(|e| CliError::csv(path, e))?.iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|rec| rec.iter().map(String::from).collect()))
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::csv(path, e))?;
    Ok((header, rows))
}
