//! CSV emission.

use std::fs::File;
use std::io::Write;
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error("row {row} has {found} fields, header has {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv encoding failed: {0}")]
    Encode(#[from] csv::Error),
}

/// Round-trip exact formatting: 17 significant digits in scientific form.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn encode<W: Write>(sink: W, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CsvError> {
    for (i, row) in rows.iter().enumerate() {
        if row.len() != header.len() {
            return Err(CsvError::Ragged {
                row: i,
                expected: header.len(),
                found: row.len(),
            });
        }
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|&x| format_number(x)))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn to_csv_string(header: &[&str], rows: &[Vec<f64>]) -> Result<String, CsvError> {
    let mut buf = Vec::new();
    encode(&mut buf, header, rows)?;
    Ok(String::from_utf8(buf).expect("csv output is ASCII"))
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CsvError> {
    let io = |source| CsvError::Io {
        path: path.display().to_string(),
        source,
    };
    let text = to_csv_string(header, rows)?;
    let mut file = File::create(path).map_err(io)?;
    file.write_all(text.as_bytes()).map_err(io)
}
