//! Sparse LU pipeline: ordering, symbolic factorization, numeric
//! factorization, triangular solves.
//!
//! The pipeline works on the symmetric-pattern model: the elimination
//! ordering is applied to both rows and columns, the symbolic phase runs
//! graph elimination on the pattern of `A + A^T`, and the numeric phase is
//! up-looking row elimination without pivoting. The generated Laplace
//! systems (diagonally dominant interior rows, identity boundary rows)
//! factor stably this way; a pivot below `1e-14 * max|A|` aborts with
//! [`DirectError::ZeroPivot`].

mod numeric;
mod ordering;
mod pipeline;
mod symbolic;

pub use numeric::{lu_solve, lu_solve_block, numeric_factorize, FactorStats, LuFactors};
pub use ordering::{minimum_degree_order, natural_order, EliminationOrdering, OrderingMethod};
pub use pipeline::direct_pipeline;
pub use symbolic::{symbolic_factorize, SymbolicFactorization};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DirectError {
    #[error("matrix is empty")]
    EmptyMatrix,
    #[error("matrix is {0}x{1}, expected square")]
    NotSquare(usize, usize),
    #[error("structurally singular: no diagonal entry in permuted row {0}")]
    StructurallySingular(usize),
    #[error("zero pivot at elimination step {0}")]
    ZeroPivot(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite values in right-hand side")]
    NonFiniteInput,
    #[error(transparent)]
    Sparse(#[from] crate::sparse::SparseError),
}

/// Sorted adjacency lists of the graph of `A + A^T`, diagonal excluded.
pub(crate) fn symmetrized_adjacency(a: &crate::sparse::CsrMatrix) -> Vec<Vec<usize>> {
    let n = a.n_rows();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let (cols, _) = a.row(i);
        for &j in cols {
            if j != i {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    adj
}
