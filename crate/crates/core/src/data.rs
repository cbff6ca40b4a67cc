use nalgebra::{DMatrix, DMatrixView};

use crate::error::{Error, Result};

/// An n×p sample matrix: rows are observations, columns are features.
///
/// Storage is column-major, so a single feature is a contiguous slice.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: DMatrix<f64>,
}

impl DataMatrix {
    /// Wraps a matrix, rejecting NaN and infinite entries.
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            let (row, col) = (pos % values.nrows(), pos / values.nrows());
            return Err(Error::Data(format!(
                "non-finite value at row {}, column {}",
                row + 1,
                col + 1
            )));
        }
        Ok(Self { values })
    }

    /// Builds from row-major nested vectors (one inner vector per sample).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != p) {
            return Err(Error::DimensionMismatch {
                expected: p,
                got: bad.len(),
            });
        }
        Self::new(DMatrix::from_fn(n, p, |i, j| rows[i][j]))
    }

    /// Builds from feature columns.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let p = columns.len();
        let n = columns.first().map_or(0, Vec::len);
        if let Some(bad) = columns.iter().find(|c| c.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: bad.len(),
            });
        }
        Self::new(DMatrix::from_fn(n, p, |i, j| columns[j][i]))
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn p(&self) -> usize {
        self.values.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.values
    }

    /// Feature `r` as a contiguous slice of length n.
    pub fn column(&self, r: usize) -> &[f64] {
        let n = self.n();
        &self.values.as_slice()[r * n..(r + 1) * n]
    }

    /// Feature `r` viewed as n samples of dimension 1.
    pub fn column_samples(&self, r: usize) -> DMatrixView<'_, f64> {
        self.values.columns(r, 1)
    }

    /// All features, viewed as n samples of dimension p.
    pub fn samples(&self) -> DMatrixView<'_, f64> {
        self.values.columns(0, self.p())
    }

    /// True when every row equals the first one.
    pub fn is_constant(&self) -> bool {
        if self.n() < 2 {
            return true;
        }
        let first = self.values.row(0);
        self.values.row_iter().all(|row| row == first)
    }

    /// Returns a copy with columns reordered: output column `k` is input column `order[k]`.
    pub fn select_columns(&self, order: &[usize]) -> Self {
        let cols: Vec<usize> = order.to_vec();
        Self {
            values: self.values.select_columns(cols.iter()),
        }
    }
}
