//! Tab-separated matrix files.
//!
//! One file per group. The first line is a header, `id` followed by one label
//! per subject column. Each following line holds a row id and that row's
//! decimal values, tab-separated. Missing values are rejected.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::data::{Matrix, TwoGroupDataset};
use crate::error::{Error, Result};

/// A single parsed TSV matrix file.
#[derive(Clone, Debug, PartialEq)]
pub struct TsvMatrix {
    pub column_labels: Vec<String>,
    pub row_ids: Vec<String>,
    pub values: Matrix,
}

pub fn parse_matrix_tsv(text: &str, path: &Path) -> Result<TsvMatrix> {
    let format_err = |message: String| Error::Format {
        path: path.to_path_buf(),
        message,
    };
    let mut lines = text.lines().map(|l| l.strip_suffix('\r').unwrap_or(l));
    let header = lines
        .next()
        .ok_or_else(|| format_err("empty file, expected a header line".into()))?;
    let mut header_fields = header.split('\t');
    match header_fields.next() {
        Some("id") => {}
        other => {
            return Err(format_err(format!(
                "header must start with \"id\", found {:?}",
                other.unwrap_or("")
            )))
        }
    }
    let column_labels: Vec<String> = header_fields.map(str::to_owned).collect();
    let n_cols = column_labels.len();

    let mut row_ids = Vec::new();
    let mut data = Vec::new();
    for (row, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let id = fields.next().unwrap_or_default();
        let mut count = 0;
        for (col, cell) in fields.enumerate() {
            let value: f64 = cell
                .trim()
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| Error::NonNumeric {
                    path: path.to_path_buf(),
                    row: row + 1,
                    col: col + 1,
                    value: cell.to_owned(),
                })?;
            data.push(value);
            count += 1;
        }
        if count != n_cols {
            return Err(format_err(format!(
                "ragged row {} ({id:?}): {count} values, header declares {n_cols}",
                row + 1
            )));
        }
        row_ids.push(id.to_owned());
    }
    if row_ids.is_empty() {
        return Err(format_err("no data rows (N = 0)".into()));
    }
    let values = Matrix::from_row_major(row_ids.len(), n_cols, data)?;
    Ok(TsvMatrix {
        column_labels,
        row_ids,
        values,
    })
}

pub fn read_matrix_tsv(path: &Path) -> Result<TsvMatrix> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_matrix_tsv(&text, path)
}

/// Loads a control/patient pair. Both files must list the same row ids in
/// the same order; a mismatch is an error rather than an implicit join.
pub fn load_dataset(control_path: &Path, patient_path: &Path) -> Result<TwoGroupDataset> {
    let control = read_matrix_tsv(control_path)?;
    let patient = read_matrix_tsv(patient_path)?;
    if control.row_ids != patient.row_ids {
        let detail = control
            .row_ids
            .iter()
            .zip(&patient.row_ids)
            .enumerate()
            .find(|(_, (a, b))| a != b)
            .map(|(i, (a, b))| format!("line {}: control has {a:?}, patient has {b:?}", i + 2))
            .unwrap_or_else(|| {
                format!(
                    "control has {} rows, patient has {}",
                    control.row_ids.len(),
                    patient.row_ids.len()
                )
            });
        return Err(Error::RowIdMismatch(detail));
    }
    TwoGroupDataset::new(control.row_ids, control.values, patient.values)
}

/// Writes a matrix in the TSV format above. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_matrix_tsv<W: Write>(
    out: &mut W,
    row_ids: &[String],
    column_labels: &[String],
    values: &Matrix,
) -> std::io::Result<()> {
    write!(out, "id")?;
    for label in column_labels {
        write!(out, "\t{label}")?;
    }
    writeln!(out)?;
    for (id, row) in row_ids.iter().zip(values.rows()) {
        write!(out, "{id}")?;
        for v in row {
            write!(out, "\t{v}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Writes `control.tsv`-style and `patient.tsv`-style files for a dataset,
/// labelling columns `x1..` and `y1..`.
pub fn save_dataset(data: &TwoGroupDataset, control_path: &Path, patient_path: &Path) -> Result<()> {
    let write = |path: &Path, prefix: &str, m: &Matrix| -> Result<()> {
        let labels: Vec<String> = (1..=m.n_cols()).map(|j| format!("{prefix}{j}")).collect();
        let mut buf = Vec::new();
        write_matrix_tsv(&mut buf, data.row_ids(), &labels, m).expect("write to Vec");
        fs::write(path, buf).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    };
    write(control_path, "x", data.control())?;
    write(patient_path, "y", data.patient())
}
