//! Sparse and dense kernels with exact flop accounting.
//!
//! Reductions run left-to-right within a row so results are bit-reproducible
//! run to run. Flop conventions: `spmv` adds `2*nnz`, the vector kernels add
//! `2*n`, `permute` moves data and adds nothing.

use super::{CsrMatrix, DenseBlock, DenseVector, Permutation, SparseError};
use crate::flops::FlopCounter;

/// `y = A * x`.
pub fn spmv(
    a: &CsrMatrix,
    x: &DenseVector,
    flops: &mut FlopCounter,
) -> Result<DenseVector, SparseError> {
    if a.n_cols() != x.len() {
        return Err(SparseError::DimensionMismatch(format!(
            "spmv: matrix is {}x{}, vector has length {}",
            a.n_rows(),
            a.n_cols(),
            x.len()
        )));
    }
    let mut y = DenseVector::zeros(a.n_rows());
    let xs = x.as_slice();
    for i in 0..a.n_rows() {
        let (cols, vals) = a.row(i);
        let mut acc = 0.0;
        for (c, v) in cols.iter().zip(vals) {
            acc += v * xs[*c];
        }
        y[i] = acc;
    }
    flops.add(2 * a.nnz() as u64);
    Ok(y)
}

/// `Y = A * B`, column by column; column `k` of the result is exactly
/// `spmv(A, column k of B)`.
pub fn spmm(
    a: &CsrMatrix,
    b: &DenseBlock,
    flops: &mut FlopCounter,
) -> Result<DenseBlock, SparseError> {
    if a.n_cols() != b.n_rows() {
        return Err(SparseError::DimensionMismatch(format!(
            "spmm: matrix is {}x{}, block has {} rows",
            a.n_rows(),
            a.n_cols(),
            b.n_rows()
        )));
    }
    let mut out = DenseBlock::zeros(a.n_rows(), b.n_cols());
    for k in 0..b.n_cols() {
        let col = b.col_vector(k);
        let y = spmv(a, &col, flops)?;
        out.set_col(k, &y);
    }
    Ok(out)
}

/// Inner product `x . y`.
pub fn dot(x: &DenseVector, y: &DenseVector, flops: &mut FlopCounter) -> Result<f64, SparseError> {
    if x.len() != y.len() {
        return Err(SparseError::DimensionMismatch(format!(
            "dot: lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    let mut acc = 0.0;
    for (a, b) in x.iter().zip(y.iter()) {
        acc += a * b;
    }
    flops.add(2 * x.len() as u64);
    Ok(acc)
}

/// Euclidean norm `||x||_2`.
pub fn norm2(x: &DenseVector, flops: &mut FlopCounter) -> f64 {
    let mut acc = 0.0;
    for v in x.iter() {
        acc += v * v;
    }
    flops.add(2 * x.len() as u64);
    acc.sqrt()
}

/// `a*x + y`.
pub fn axpy(
    a: f64,
    x: &DenseVector,
    y: &DenseVector,
    flops: &mut FlopCounter,
) -> Result<DenseVector, SparseError> {
    if x.len() != y.len() {
        return Err(SparseError::DimensionMismatch(format!(
            "axpy: lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    let out = DenseVector::from_fn(x.len(), |i| a * x[i] + y[i]);
    flops.add(2 * x.len() as u64);
    Ok(out)
}

/// Permuted matrix with `result(i, j) = A(p_row(i), p_col(j))`.
pub fn permute(
    a: &CsrMatrix,
    p_row: &Permutation,
    p_col: &Permutation,
) -> Result<CsrMatrix, SparseError> {
    if p_row.len() != a.n_rows() || p_col.len() != a.n_cols() {
        return Err(SparseError::DimensionMismatch(format!(
            "permute: matrix is {}x{}, permutations have lengths {} and {}",
            a.n_rows(),
            a.n_cols(),
            p_row.len(),
            p_col.len()
        )));
    }
    // result(i, j) = A(p_row(i), p_col(j)): entry (r, c) of A lands in row
    // p_row^-1(r), column p_col^-1(c).
    let col_inv = p_col.inverse();
    let mut row_ptr = Vec::with_capacity(a.n_rows() + 1);
    let mut col_idx = Vec::with_capacity(a.nnz());
    let mut values = Vec::with_capacity(a.nnz());
    let mut scratch: Vec<(usize, f64)> = Vec::new();
    row_ptr.push(0);
    for i in 0..a.n_rows() {
        let (cols, vals) = a.row(p_row.map(i));
        scratch.clear();
        for (c, v) in cols.iter().zip(vals) {
            scratch.push((col_inv.map(*c), *v));
        }
        scratch.sort_by_key(|&(c, _)| c);
        for &(c, v) in &scratch {
            col_idx.push(c);
            values.push(v);
        }
        row_ptr.push(col_idx.len());
    }
    CsrMatrix::new(a.n_rows(), a.n_cols(), row_ptr, col_idx, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::CooTriplets;

    fn three_point(n: usize) -> CsrMatrix {
        let mut t = CooTriplets::new(n, n);
        for i in 0..n {
            t.push(i, i, 2.0);
            if i > 0 {
                t.push(i, i - 1, -1.0);
            }
            if i + 1 < n {
                t.push(i, i + 1, -1.0);
            }
        }
        t.to_csr().unwrap()
    }

    #[test]
    fn spmv_identity() {
        let a = CsrMatrix::identity(2);
        let x = DenseVector::from_vec(vec![5.0, 6.0]);
        let mut f = FlopCounter::new();
        let y = spmv(&a, &x, &mut f).unwrap();
        assert_eq!(y.as_slice(), &[5.0, 6.0]);
        assert_eq!(f.total(), 2 * 2);
    }

    #[test]
    fn spmv_three_point_stencil() {
        let a = three_point(3);
        let x = DenseVector::from_vec(vec![1.0, 1.0, 1.0]);
        let mut f = FlopCounter::new();
        let y = spmv(&a, &x, &mut f).unwrap();
        assert_eq!(y.as_slice(), &[1.0, 0.0, 1.0]);
        assert_eq!(f.total(), 2 * a.nnz() as u64);
    }

    #[test]
    fn spmv_zero_matrix() {
        let a = CsrMatrix::new(3, 3, vec![0, 0, 0, 0], vec![], vec![]).unwrap();
        let x = DenseVector::from_vec(vec![1.0, -2.0, 7.0]);
        let y = spmv(&a, &x, &mut FlopCounter::new()).unwrap();
        assert_eq!(y.as_slice(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn spmv_dimension_mismatch() {
        let a = CsrMatrix::identity(2);
        let x = DenseVector::zeros(3);
        assert!(matches!(
            spmv(&a, &x, &mut FlopCounter::new()),
            Err(SparseError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn spmm_matches_columnwise_spmv_bitwise() {
        let a = three_point(3);
        let b = DenseBlock::from_columns(&[
            DenseVector::from_vec(vec![1.0, 1.0, 1.0]),
            DenseVector::from_vec(vec![0.25, -3.0, 2.5]),
        ])
        .unwrap();
        let y = spmm(&a, &b, &mut FlopCounter::new()).unwrap();
        assert_eq!(y.col(0), &[1.0, 0.0, 1.0]);
        for k in 0..2 {
            let per_col = spmv(&a, &b.col_vector(k), &mut FlopCounter::new()).unwrap();
            assert_eq!(y.col(k), per_col.as_slice());
        }
    }

    #[test]
    fn spmm_identity_and_empty() {
        let a = CsrMatrix::identity(3);
        let b = DenseBlock::from_columns(&[DenseVector::from_vec(vec![1.0, 2.0, 3.0])]).unwrap();
        assert_eq!(spmm(&a, &b, &mut FlopCounter::new()).unwrap(), b);
        let empty = DenseBlock::zeros(3, 0);
        let y = spmm(&a, &empty, &mut FlopCounter::new()).unwrap();
        assert_eq!(y.n_cols(), 0);
    }

    #[test]
    fn vector_kernels() {
        let mut f = FlopCounter::new();
        let x = DenseVector::from_vec(vec![1.0, 2.0]);
        let y = DenseVector::from_vec(vec![3.0, 4.0]);
        assert_eq!(dot(&x, &y, &mut f).unwrap(), 11.0);
        assert_eq!(f.total(), 4);
        assert_eq!(norm2(&DenseVector::from_vec(vec![3.0, 4.0]), &mut f), 5.0);
        assert_eq!(f.total(), 8);
        let z = axpy(
            2.0,
            &DenseVector::from_vec(vec![1.0, 1.0]),
            &DenseVector::from_vec(vec![0.0, 1.0]),
            &mut f,
        )
        .unwrap();
        assert_eq!(z.as_slice(), &[2.0, 3.0]);
        assert_eq!(f.total(), 12);
    }

    #[test]
    fn permute_identity_is_noop() {
        let a = three_point(4);
        let id = Permutation::identity(4);
        assert_eq!(permute(&a, &id, &id).unwrap(), a);
    }

    #[test]
    fn permute_row_swap() {
        let mut t = CooTriplets::new(2, 2);
        t.push(0, 0, 1.0);
        t.push(1, 1, 2.0);
        let a = t.to_csr().unwrap();
        let swap = Permutation::from_forward(vec![1, 0]).unwrap();
        let id = Permutation::identity(2);
        let b = permute(&a, &swap, &id).unwrap();
        assert_eq!(b.get(0, 1), Some(2.0));
        assert_eq!(b.get(1, 0), Some(1.0));
        assert_eq!(b.get(0, 0), None);
    }

    #[test]
    fn permute_round_trip_is_exact() {
        let a = three_point(5);
        let p = Permutation::from_forward(vec![3, 1, 4, 0, 2]).unwrap();
        let q = Permutation::from_forward(vec![2, 0, 1, 4, 3]).unwrap();
        let b = permute(&a, &p, &q).unwrap();
        let back = permute(&b, &p.inverse(), &q.inverse()).unwrap();
        assert_eq!(back, a);
    }
}
