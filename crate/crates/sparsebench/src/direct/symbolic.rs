//! Symbolic factorization: factor patterns and the elimination tree, from
//! the sparsity structure alone.

use super::{symmetrized_adjacency, DirectError, EliminationOrdering};
use crate::sparse::CsrMatrix;

/// Predicted factor structure for the permuted matrix.
///
/// `l_*` holds the strictly-below-diagonal pattern of `L` by rows, `u_*` the
/// diagonal-and-above pattern of `U` by rows; both are sorted within each
/// row. `predicted_fill_nnz` counts `nnz(L below diagonal) + nnz(U with
/// diagonal)`, i.e. every predicted position once.
#[derive(Debug, Clone)]
pub struct SymbolicFactorization {
    pub(crate) ordering: EliminationOrdering,
    pub(crate) n: usize,
    pub(crate) l_row_ptr: Vec<usize>,
    pub(crate) l_col_idx: Vec<usize>,
    pub(crate) u_row_ptr: Vec<usize>,
    pub(crate) u_col_idx: Vec<usize>,
    etree: Vec<Option<usize>>,
    predicted_fill_nnz: usize,
}

impl SymbolicFactorization {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ordering(&self) -> &EliminationOrdering {
        &self.ordering
    }

    /// Parent of each column in the elimination tree (`None` for roots).
    pub fn etree(&self) -> &[Option<usize>] {
        &self.etree
    }

    pub fn predicted_fill_nnz(&self) -> usize {
        self.predicted_fill_nnz
    }

    /// Strictly-below-diagonal pattern of row `i` of `L`.
    pub fn l_row(&self, i: usize) -> &[usize] {
        &self.l_col_idx[self.l_row_ptr[i]..self.l_row_ptr[i + 1]]
    }

    /// Diagonal-and-above pattern of row `i` of `U`.
    pub fn u_row(&self, i: usize) -> &[usize] {
        &self.u_col_idx[self.u_row_ptr[i]..self.u_row_ptr[i + 1]]
    }
}

/// Computes the fill pattern of the LU factors by graph elimination on the
/// permuted pattern of `A + A^T`, along with the elimination tree. No
/// numeric values are touched.
pub fn symbolic_factorize(
    a: &CsrMatrix,
    ordering: &EliminationOrdering,
) -> Result<SymbolicFactorization, DirectError> {
    let n = a.n_rows();
    if n == 0 {
        return Err(DirectError::EmptyMatrix);
    }
    if a.n_rows() != a.n_cols() {
        return Err(DirectError::NotSquare(a.n_rows(), a.n_cols()));
    }
    let perm = &ordering.col_perm;
    if perm.len() != n {
        return Err(DirectError::DimensionMismatch(format!(
            "ordering has length {}, matrix is {}x{}",
            perm.len(),
            n,
            n
        )));
    }
    // The permuted matrix needs a structural diagonal for pivots to exist.
    for i in 0..n {
        let o = perm.map(i);
        if a.get(o, o).is_none() {
            return Err(DirectError::StructurallySingular(i));
        }
    }

    // Lower adjacency of the permuted symmetrized pattern: for each permuted
    // row k, the permuted columns j < k.
    let orig_adj = symmetrized_adjacency(a);
    let inv = perm.inverse();
    let mut lower: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, row) in lower.iter_mut().enumerate() {
        let o = perm.map(k);
        for &w in &orig_adj[o] {
            let j = inv.map(w);
            if j < k {
                row.push(j);
            }
        }
        row.sort_unstable();
    }

    // Elimination tree (path-compressed ancestor pointers).
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut ancestor: Vec<Option<usize>> = vec![None; n];
    for (k, row) in lower.iter().enumerate() {
        for &j in row {
            let mut r = j;
            loop {
                match ancestor[r] {
                    Some(anc) if anc == k => break,
                    Some(anc) => {
                        ancestor[r] = Some(k);
                        r = anc;
                    }
                    None => {
                        ancestor[r] = Some(k);
                        parent[r] = Some(k);
                        break;
                    }
                }
            }
        }
    }

    // Row patterns of L from the row-subtree characterization: row k reaches
    // the etree path from every entry of lower[k] up towards k.
    let mut marker = vec![usize::MAX; n];
    let mut l_row_ptr = Vec::with_capacity(n + 1);
    let mut l_col_idx: Vec<usize> = Vec::new();
    l_row_ptr.push(0);
    let mut row: Vec<usize> = Vec::new();
    for (k, lower_row) in lower.iter().enumerate() {
        row.clear();
        marker[k] = k;
        for &j in lower_row {
            let mut r = j;
            while marker[r] != k {
                marker[r] = k;
                row.push(r);
                match parent[r] {
                    Some(p) if p < k => r = p,
                    _ => break,
                }
            }
        }
        row.sort_unstable();
        l_col_idx.extend_from_slice(&row);
        l_row_ptr.push(l_col_idx.len());
    }

    // Symmetric-pattern model: the pattern of U is the transpose of L plus
    // the diagonal.
    let l_nnz = l_col_idx.len();
    let mut u_counts = vec![0usize; n + 1];
    for i in 0..n {
        u_counts[i + 1] += 1; // diagonal
        for &j in &l_col_idx[l_row_ptr[i]..l_row_ptr[i + 1]] {
            u_counts[j + 1] += 1;
        }
    }
    for i in 0..n {
        u_counts[i + 1] += u_counts[i];
    }
    let mut u_col_idx = vec![0usize; l_nnz + n];
    let mut next = u_counts.clone();
    // Diagonal first in each row, then transposed entries; visiting L rows in
    // ascending order keeps every U row sorted.
    for (i, slot) in next.iter_mut().enumerate().take(n) {
        u_col_idx[*slot] = i;
        *slot += 1;
    }
    for i in 0..n {
        for &j in &l_col_idx[l_row_ptr[i]..l_row_ptr[i + 1]] {
            u_col_idx[next[j]] = i;
            next[j] += 1;
        }
    }

    let predicted_fill_nnz = l_nnz + u_col_idx.len();
    Ok(SymbolicFactorization {
        ordering: ordering.clone(),
        n,
        l_row_ptr,
        l_col_idx,
        u_row_ptr: u_counts,
        u_col_idx,
        etree: parent,
        predicted_fill_nnz,
    })
}
