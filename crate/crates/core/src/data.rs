//! Two-group expression data, rejection lists and vote tallies.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::error::{Error, Result};

/// Dense row-major matrix of reals. Rows are genes, columns are subjects.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_row_major(n_rows: usize, n_cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n_rows * n_cols {
            return Err(Error::InvalidDataset(format!(
                "matrix buffer has {} cells, expected {}x{}",
                data.len(),
                n_rows,
                n_cols
            )));
        }
        Ok(Matrix { n_rows, n_cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != n_cols) {
            return Err(Error::InvalidDataset(format!(
                "ragged rows: row {bad} has {} cells, expected {n_cols}",
                rows[bad].len()
            )));
        }
        let data = rows.iter().flatten().copied().collect();
        Ok(Matrix {
            n_rows: rows.len(),
            n_cols,
            data,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        (0..self.n_rows).map(move |i| self.row(i))
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n_cols + col]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.n_rows).map(|r| self.get(r, col)).collect()
    }

    /// New matrix whose `j`-th column is column `cols[j]` of `self`.
    /// Indices may repeat.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(self.n_rows * cols.len());
        for r in 0..self.n_rows {
            let row = self.row(r);
            data.extend(cols.iter().map(|&c| row[c]));
        }
        Matrix {
            n_rows: self.n_rows,
            n_cols: cols.len(),
            data,
        }
    }
}

/// An `N x n_X` control matrix and an `N x n_Y` patient matrix sharing row ids.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoGroupDataset {
    row_ids: Vec<String>,
    control: Matrix,
    patient: Matrix,
}

impl TwoGroupDataset {
    /// Builds a dataset for storage. Groups need at least one column each;
    /// see [`TwoGroupDataset::check_testable`] for the stricter requirement
    /// applied before t-testing.
    pub fn new(row_ids: Vec<String>, control: Matrix, patient: Matrix) -> Result<Self> {
        if control.n_rows() == 0 {
            return Err(Error::InvalidDataset("dataset has no rows".into()));
        }
        if control.n_rows() != patient.n_rows() {
            return Err(Error::InvalidDataset(format!(
                "control has {} rows, patient has {}",
                control.n_rows(),
                patient.n_rows()
            )));
        }
        if row_ids.len() != control.n_rows() {
            return Err(Error::InvalidDataset(format!(
                "{} row ids for {} rows",
                row_ids.len(),
                control.n_rows()
            )));
        }
        if control.n_cols() == 0 || patient.n_cols() == 0 {
            return Err(Error::InvalidDataset(
                "each group needs at least one column".into(),
            ));
        }
        let mut seen = HashSet::with_capacity(row_ids.len());
        for id in &row_ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::InvalidDataset(format!("duplicate row id {id:?}")));
            }
        }
        Ok(TwoGroupDataset {
            row_ids,
            control,
            patient,
        })
    }

    /// Dataset with generated row ids `g0, g1, ...`.
    pub fn with_default_ids(control: Matrix, patient: Matrix) -> Result<Self> {
        let ids = (0..control.n_rows()).map(|i| format!("g{i}")).collect();
        Self::new(ids, control, patient)
    }

    /// Row-wise t-tests need two observations per group.
    pub fn check_testable(&self) -> Result<()> {
        if self.n_x() < 2 || self.n_y() < 2 {
            return Err(Error::InvalidDataset(format!(
                "t-testing needs at least 2 columns per group (got n_x={}, n_y={})",
                self.n_x(),
                self.n_y()
            )));
        }
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.control.n_rows()
    }

    pub fn n_x(&self) -> usize {
        self.control.n_cols()
    }

    pub fn n_y(&self) -> usize {
        self.patient.n_cols()
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn control(&self) -> &Matrix {
        &self.control
    }

    pub fn patient(&self) -> &Matrix {
        &self.patient
    }

    /// Pseudo-dataset built from the given control and patient column indices.
    pub fn select_columns(&self, control_cols: &[usize], patient_cols: &[usize]) -> Self {
        TwoGroupDataset {
            row_ids: self.row_ids.clone(),
            control: self.control.select_columns(control_cols),
            patient: self.patient.select_columns(patient_cols),
        }
    }
}

/// A set of row indices declared non-null, tagged with the level it was
/// produced at and where it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct RejectionList {
    n_rows: usize,
    rows: BTreeSet<usize>,
    level_q: f64,
    source_label: String,
}

impl RejectionList {
    pub fn new(
        n_rows: usize,
        rows: impl IntoIterator<Item = usize>,
        level_q: f64,
        source_label: impl Into<String>,
    ) -> Result<Self> {
        let rows: BTreeSet<usize> = rows.into_iter().collect();
        if let Some(&row) = rows.iter().next_back().filter(|&&r| r >= n_rows) {
            return Err(Error::RowOutOfRange { row, n_rows });
        }
        if !(level_q > 0.0 && level_q <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "level_q must lie in (0, 1], got {level_q}"
            )));
        }
        Ok(RejectionList {
            n_rows,
            rows,
            level_q,
            source_label: source_label.into(),
        })
    }

    /// The set of truly non-null rows. Carries `level_q = 1`.
    pub fn truth(n_rows: usize, rows: impl IntoIterator<Item = usize>) -> Result<Self> {
        Self::new(n_rows, rows, 1.0, "truth")
    }

    pub fn empty(n_rows: usize, level_q: f64, source_label: impl Into<String>) -> Result<Self> {
        Self::new(n_rows, std::iter::empty(), level_q, source_label)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn rows(&self) -> &BTreeSet<usize> {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn contains(&self, row: usize) -> bool {
        self.rows.contains(&row)
    }

    pub fn level_q(&self) -> f64 {
        self.level_q
    }

    pub fn source_label(&self) -> &str {
        &self.source_label
    }

    pub fn intersection_len(&self, other: &RejectionList) -> usize {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.rows.iter().filter(|r| large.rows.contains(r)).count()
    }

    pub(crate) fn check_same_rows(&self, other: &RejectionList) -> Result<()> {
        if self.n_rows != other.n_rows {
            return Err(Error::RowCountMismatch {
                expected: self.n_rows,
                found: other.n_rows,
            });
        }
        Ok(())
    }
}

impl fmt::Display for RejectionList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [q={}]: {:?}", self.source_label, self.level_q, self.rows)
    }
}

/// Counts `(hits, misses)` of `list` against `truth`: `hits` rows are in
/// both, `misses` are in `list` only.
pub fn truelist_overlap(list: &RejectionList, truth: &RejectionList) -> Result<(usize, usize)> {
    list.check_same_rows(truth)?;
    let hits = list.intersection_len(truth);
    Ok((hits, list.len() - hits))
}

/// Per-row vote counts over the original list and `B` pseudo-sample lists.
///
/// `votes[i]` is V(i), the number of lists containing row `i`;
/// `weighted_votes[i]` is V*(i), which counts the original list twice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VoteTally {
    votes: Vec<u32>,
    weighted_votes: Vec<u32>,
    n_voters: usize,
}

impl VoteTally {
    pub(crate) fn from_parts(votes: Vec<u32>, weighted_votes: Vec<u32>, n_voters: usize) -> Self {
        debug_assert_eq!(votes.len(), weighted_votes.len());
        VoteTally {
            votes,
            weighted_votes,
            n_voters,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.votes.len()
    }

    /// Number of voting lists, `B + 1`.
    pub fn n_voters(&self) -> usize {
        self.n_voters
    }

    pub fn votes(&self) -> &[u32] {
        &self.votes
    }

    pub fn weighted_votes(&self) -> &[u32] {
        &self.weighted_votes
    }

    pub fn vote(&self, row: usize) -> u32 {
        self.votes[row]
    }

    pub fn weighted_vote(&self, row: usize) -> u32 {
        self.weighted_votes[row]
    }
}
