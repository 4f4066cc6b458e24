//! Deterministic TSV writers. Reals are printed in fixed notation with six
//! decimal places; every file starts with a `#` comment saying so.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::CliError;

pub const REAL_FORMAT_NOTE: &str = "reals in fixed notation with 6 decimal places";

pub fn real(v: f64) -> String {
    format!("{v:.6}")
}

/// Accumulates one TSV file in memory.
pub struct Table {
    text: String,
}

impl Table {
    pub fn new(description: &str, columns: &[&str]) -> Self {
        let mut text = format!("# {description}; {REAL_FORMAT_NOTE}\n");
        text.push_str(&columns.join("\t"));
        text.push('\n');
        Table { text }
    }

    pub fn row<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut first = true;
        for cell in cells {
            if !first {
                self.text.push('\t');
            }
            first = false;
            self.text.push_str(cell.as_ref());
        }
        self.text.push('\n');
    }

    pub fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.text, "{key}\t{value}");
    }

    pub fn write_to(&self, path: &Path) -> Result<(), CliError> {
        write_file(path, &self.text)
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Internal(format!("cannot create output directory {}: {e}", dir.display())))
}
