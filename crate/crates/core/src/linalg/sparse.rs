use crate::error::{check_len, Error, Result};
use crate::Real;

/// Compressed sparse row matrix.
///
/// Products with the transpose are computed by a scatter pass over the rows;
/// the transpose is never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<T>,
}

impl<T: Real> SparseMatrix<T> {
    /// Builds a matrix from raw CSR arrays, validating every structural invariant.
    pub fn from_csr(
        n_rows: usize,
        n_cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<T>,
    ) -> Result<Self> {
        if row_offsets.len() != n_rows + 1 {
            return Err(Error::InvalidMatrix(format!(
                "row_offsets has length {}, expected {}",
                row_offsets.len(),
                n_rows + 1
            )));
        }
        if row_offsets[0] != 0 {
            return Err(Error::InvalidMatrix("row_offsets must start at 0".into()));
        }
        if row_offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidMatrix("row_offsets must be nondecreasing".into()));
        }
        let nnz = row_offsets[n_rows];
        if col_indices.len() != nnz || values.len() != nnz {
            return Err(Error::InvalidMatrix(format!(
                "expected {nnz} stored entries, found {} indices and {} values",
                col_indices.len(),
                values.len()
            )));
        }
        if let Some(&c) = col_indices.iter().find(|&&c| c >= n_cols) {
            return Err(Error::InvalidMatrix(format!(
                "column index {c} out of range for {n_cols} columns"
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix("values must be finite".into()));
        }
        Ok(Self {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicate positions
    /// are summed; explicit zeros are kept.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, T)>,
    ) -> Result<Self> {
        let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); n_rows];
        for (r, c, v) in triplets {
            if r >= n_rows || c >= n_cols {
                return Err(Error::InvalidMatrix(format!(
                    "entry ({r}, {c}) outside {n_rows}x{n_cols}"
                )));
            }
            rows[r].push((c, v));
        }
        Self::from_rows(n_cols, rows)
    }

    /// Builds a matrix from per-row `(col, value)` lists. Columns need not be
    /// sorted; duplicates are summed.
    pub fn from_rows(n_cols: usize, rows: Vec<Vec<(usize, T)>>) -> Result<Self> {
        let n_rows = rows.len();
        let mut row_offsets = Vec::with_capacity(n_rows + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            let mut last: Option<usize> = None;
            for (c, v) in row {
                if last == Some(c) {
                    *values.last_mut().expect("previous entry") += v;
                } else {
                    col_indices.push(c);
                    values.push(v);
                    last = Some(c);
                }
            }
            row_offsets.push(col_indices.len());
        }
        Self::from_csr(n_rows, n_cols, row_offsets, col_indices, values)
    }

    /// Row-major dense input; zeros are dropped.
    pub fn from_dense(n_rows: usize, n_cols: usize, dense: &[T]) -> Result<Self> {
        check_len("dense matrix", n_rows * n_cols, dense.len())?;
        let rows = dense
            .chunks(n_cols.max(1))
            .take(n_rows)
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(c, &v)| (c, v))
                    .collect()
            })
            .collect();
        Self::from_rows(n_cols, rows)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n_rows: n,
            n_cols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![T::one(); n],
        }
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            row_offsets: vec![0; n_rows + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_rows, self.n_cols)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Stored `(col, value)` pairs of one row.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let span = self.row_offsets[i]..self.row_offsets[i + 1];
        self.col_indices[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    /// `A x`
    pub fn matvec(&self, x: &[T]) -> Result<Vec<T>> {
        check_len("matvec operand", self.n_cols, x.len())?;
        Ok((0..self.n_rows)
            .map(|i| self.row(i).map(|(c, v)| v * x[c]).sum())
            .collect())
    }

    /// `Aᵀ y`
    pub fn transpose_matvec(&self, y: &[T]) -> Result<Vec<T>> {
        check_len("transpose_matvec operand", self.n_rows, y.len())?;
        let mut out = vec![T::zero(); self.n_cols];
        for (i, &yi) in y.iter().enumerate() {
            if yi.is_zero() {
                continue;
            }
            for (c, v) in self.row(i) {
                out[c] += v * yi;
            }
        }
        Ok(out)
    }

    /// `Aᵀ A x` in two passes.
    pub fn normal_matvec(&self, x: &[T]) -> Result<Vec<T>> {
        let ax = self.matvec(x)?;
        self.transpose_matvec(&ax)
    }

    pub fn frobenius_norm(&self) -> T {
        self.values.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.n_rows).map(|i| self.row(i).map(|(_, v)| v).sum()).collect()
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<T> {
        let mut dense = vec![T::zero(); self.n_rows * self.n_cols];
        for i in 0..self.n_rows {
            for (c, v) in self.row(i) {
                dense[i * self.n_cols + c] += v;
            }
        }
        dense
    }

    /// Estimates the spectral norm `‖A‖₂` with `iterations` power steps on
    /// `AᵀA`, started from the normalized all-ones vector.
    pub fn spectral_norm_estimate(&self, iterations: usize) -> T {
        if self.n_cols == 0 || self.nnz() == 0 {
            return T::zero();
        }
        let mut v = vec![T::one() / T::of_usize(self.n_cols).sqrt(); self.n_cols];
        let mut lambda = T::zero();
        for _ in 0..iterations {
            let w = self.normal_matvec(&v).expect("dimensions fixed by construction");
            let nw = super::norm2(&w);
            if nw.is_zero() {
                break;
            }
            lambda = nw;
            v = w.into_iter().map(|x| x / nw).collect();
        }
        lambda.sqrt()
    }
}
