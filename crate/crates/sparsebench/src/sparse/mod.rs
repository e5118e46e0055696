//! Sparse and dense containers shared by every solver.
//!
//! The compressed sparse row matrix is the universal operand: assembly stages
//! entries as [`CooTriplets`], converts once to [`CsrMatrix`], and both solver
//! families consume the CSR form. Indices are `usize` (64-bit on the targets
//! we care about; large grids overflow 32 bits), values are `f64`.

pub mod io;
mod kernels;

pub use kernels::{axpy, dot, norm2, permute, spmm, spmv};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SparseError {
    #[error("entry ({row},{col}) out of range for a {n_rows}x{n_cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        n_rows: usize,
        n_cols: usize,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid CSR structure: {0}")]
    InvalidStructure(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
}

/// Assembly staging: a list of `(row, col, value)` triplets.
///
/// Duplicates are allowed and are summed on conversion to CSR, which matches
/// element-by-element accumulation in finite element assembly.
#[derive(Debug, Clone)]
pub struct CooTriplets {
    pub n_rows: usize,
    pub n_cols: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl CooTriplets {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        self.entries.push((row, col, value));
    }

    /// Converts to CSR, summing duplicate entries.
    pub fn to_csr(&self) -> Result<CsrMatrix, SparseError> {
        for &(r, c, _) in &self.entries {
            if r >= self.n_rows || c >= self.n_cols {
                return Err(SparseError::IndexOutOfRange {
                    row: r,
                    col: c,
                    n_rows: self.n_rows,
                    n_cols: self.n_cols,
                });
            }
        }
        // Counting sort by row keeps the conversion linear and deterministic.
        let mut row_counts = vec![0usize; self.n_rows + 1];
        for &(r, _, _) in &self.entries {
            row_counts[r + 1] += 1;
        }
        for i in 0..self.n_rows {
            row_counts[i + 1] += row_counts[i];
        }
        let mut order: Vec<usize> = vec![0; self.entries.len()];
        let mut next = row_counts.clone();
        for (k, &(r, _, _)) in self.entries.iter().enumerate() {
            order[next[r]] = k;
            next[r] += 1;
        }

        let mut row_ptr = Vec::with_capacity(self.n_rows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        let mut row_entries: Vec<(usize, f64)> = Vec::new();
        for r in 0..self.n_rows {
            row_entries.clear();
            for &k in &order[row_counts[r]..row_counts[r + 1]] {
                let (_, c, v) = self.entries[k];
                row_entries.push((c, v));
            }
            // Stable sort so duplicate entries sum in insertion order.
            row_entries.sort_by_key(|&(c, _)| c);
            let mut i = 0;
            while i < row_entries.len() {
                let c = row_entries[i].0;
                let mut v = row_entries[i].1;
                i += 1;
                while i < row_entries.len() && row_entries[i].0 == c {
                    v += row_entries[i].1;
                    i += 1;
                }
                col_idx.push(c);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix::new(self.n_rows, self.n_cols, row_ptr, col_idx, values)
    }
}

/// Compressed sparse row matrix.
///
/// Invariants, enforced by [`CsrMatrix::new`] and preserved by every
/// operation in this crate:
/// * `row_ptr[0] == 0`, `row_ptr[n_rows] == nnz`, `row_ptr` non-decreasing;
/// * within each row, column indices strictly increasing;
/// * `col_idx.len() == values.len() == nnz`.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self, SparseError> {
        if row_ptr.len() != n_rows + 1 {
            return Err(SparseError::InvalidStructure(format!(
                "row_ptr length {} != n_rows+1 = {}",
                row_ptr.len(),
                n_rows + 1
            )));
        }
        if row_ptr[0] != 0 || row_ptr[n_rows] != col_idx.len() {
            return Err(SparseError::InvalidStructure(
                "row_ptr must start at 0 and end at nnz".into(),
            ));
        }
        if col_idx.len() != values.len() {
            return Err(SparseError::InvalidStructure(
                "col_idx and values length differ".into(),
            ));
        }
        for i in 0..n_rows {
            if row_ptr[i] > row_ptr[i + 1] {
                return Err(SparseError::InvalidStructure(format!(
                    "row_ptr decreases at row {i}"
                )));
            }
            let row = &col_idx[row_ptr[i]..row_ptr[i + 1]];
            for w in row.windows(2) {
                if w[0] >= w[1] {
                    return Err(SparseError::InvalidStructure(format!(
                        "row {i} columns not strictly increasing"
                    )));
                }
            }
            if let Some(&last) = row.last() {
                if last >= n_cols {
                    return Err(SparseError::IndexOutOfRange {
                        row: i,
                        col: last,
                        n_rows,
                        n_cols,
                    });
                }
            }
        }
        Ok(Self {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n_rows: n,
            n_cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Mutable access to the stored values; the structure is untouched, so
    /// the CSR invariants cannot be violated.
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[span.clone()], &self.values[span])
    }

    /// Entry lookup by binary search within the (sorted) row.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).ok().map(|k| vals[k])
    }

    /// Largest absolute value over all stored entries.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Percentage of stored entries relative to the full `n_rows * n_cols`.
    pub fn density_percent(&self) -> f64 {
        if self.n_rows == 0 || self.n_cols == 0 {
            return 0.0;
        }
        100.0 * self.nnz() as f64 / (self.n_rows as f64 * self.n_cols as f64)
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut counts = vec![0usize; self.n_cols + 1];
        for &c in &self.col_idx {
            counts[c + 1] += 1;
        }
        for j in 0..self.n_cols {
            counts[j + 1] += counts[j];
        }
        let mut col_idx = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        let mut next = counts.clone();
        for i in 0..self.n_rows {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let c = self.col_idx[k];
                col_idx[next[c]] = i;
                values[next[c]] = self.values[k];
                next[c] += 1;
            }
        }
        CsrMatrix {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            row_ptr: counts,
            col_idx,
            values,
        }
    }

    /// Frobenius norm of all stored entries.
    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Dense vector of `f64` values.
///
/// Solvers reject vectors carrying NaN or infinities at their entry points;
/// construction itself does not police values so that intermediate arithmetic
/// stays cheap.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DenseVector(Vec<f64>);

impl DenseVector {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn from_vec(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> f64) -> Self {
        Self((0..n).map(f).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn scale(&mut self, a: f64) {
        for v in &mut self.0 {
            *v *= a;
        }
    }
}

impl std::ops::Index<usize> for DenseVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl std::ops::IndexMut<usize> for DenseVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl From<Vec<f64>> for DenseVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Dense matrix in column-major storage, used for blocks of right-hand sides
/// `B = [b_1 .. b_t]` and solutions `X = [x_1 .. x_t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseBlock {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl DenseBlock {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            data: vec![0.0; n_rows * n_cols],
        }
    }

    pub fn from_columns(columns: &[DenseVector]) -> Result<Self, SparseError> {
        let n_rows = columns.first().map_or(0, |c| c.len());
        for c in columns {
            if c.len() != n_rows {
                return Err(SparseError::DimensionMismatch(
                    "block columns have differing lengths".into(),
                ));
            }
        }
        let mut data = Vec::with_capacity(n_rows * columns.len());
        for c in columns {
            data.extend_from_slice(c.as_slice());
        }
        Ok(Self {
            n_rows,
            n_cols: columns.len(),
            data,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn col(&self, k: usize) -> &[f64] {
        &self.data[k * self.n_rows..(k + 1) * self.n_rows]
    }

    pub fn col_mut(&mut self, k: usize) -> &mut [f64] {
        &mut self.data[k * self.n_rows..(k + 1) * self.n_rows]
    }

    /// Copies column `k` out as a vector, bitwise identical to storage.
    pub fn col_vector(&self, k: usize) -> DenseVector {
        DenseVector::from_vec(self.col(k).to_vec())
    }

    pub fn set_col(&mut self, k: usize, v: &DenseVector) {
        self.col_mut(k).copy_from_slice(v.as_slice());
    }
}

/// Permutation of `n` indices, stored as the forward map: `forward[i]` is the
/// source index placed at position `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    forward: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self {
            forward: (0..n).collect(),
        }
    }

    pub fn from_forward(forward: Vec<usize>) -> Result<Self, SparseError> {
        let n = forward.len();
        let mut seen = vec![false; n];
        for &p in &forward {
            if p >= n {
                return Err(SparseError::InvalidPermutation(format!(
                    "index {p} out of range [0,{n})"
                )));
            }
            if seen[p] {
                return Err(SparseError::InvalidPermutation(format!(
                    "index {p} repeated"
                )));
            }
            seen[p] = true;
        }
        Ok(Self { forward })
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    /// Source index mapped to position `i`.
    pub fn map(&self, i: usize) -> usize {
        self.forward[i]
    }

    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0usize; self.forward.len()];
        for (i, &p) in self.forward.iter().enumerate() {
            inv[p] = i;
        }
        Permutation { forward: inv }
    }

    /// Gathers `v` so that `out[i] = v[forward[i]]`.
    pub fn apply_vec(&self, v: &DenseVector) -> DenseVector {
        DenseVector::from_fn(self.forward.len(), |i| v[self.forward[i]])
    }

    /// Scatters `v` so that `out[forward[i]] = v[i]` (the inverse action).
    pub fn apply_inverse_vec(&self, v: &DenseVector) -> DenseVector {
        let mut out = DenseVector::zeros(self.forward.len());
        for (i, &p) in self.forward.iter().enumerate() {
            out[p] = v[i];
        }
        out
    }
}
