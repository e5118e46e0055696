//! Numeric LU factorization (up-looking, no pivoting) and triangular solves.

use super::{DirectError, SymbolicFactorization};
use crate::flops::FlopCounter;
use crate::sparse::{permute, CsrMatrix, DenseBlock, DenseVector, Permutation};
use std::time::Instant;

/// Fill-in and cost accounting for one factorization.
///
/// `fill_nnz` counts the stored entries of both factors, i.e. `L` including
/// its unit diagonal plus `U` including its diagonal. Phase timings are
/// populated by [`super::direct_pipeline`]; a standalone
/// [`numeric_factorize`] only fills the numeric time.
#[derive(Debug, Clone, Copy, Default)]
pub struct FactorStats {
    pub fill_nnz: u64,
    pub fill_density_percent: f64,
    pub factor_flops: u64,
    pub ordering_seconds: f64,
    pub symbolic_seconds: f64,
    pub numeric_seconds: f64,
    pub solve_seconds: f64,
}

/// LU factors of the symmetrically permuted matrix: `P A P^T = L U`.
///
/// `L` is unit lower triangular (unit diagonal stored), `U` upper triangular
/// with nonzero diagonal. Immutable after construction; concurrent solves on
/// distinct right-hand sides are safe because each solve owns its workspace.
#[derive(Debug, Clone)]
pub struct LuFactors {
    l: CsrMatrix,
    u: CsrMatrix,
    perm: Permutation,
    pub stats: FactorStats,
}

impl LuFactors {
    pub fn n(&self) -> usize {
        self.l.n_rows()
    }

    pub fn l(&self) -> &CsrMatrix {
        &self.l
    }

    pub fn u(&self) -> &CsrMatrix {
        &self.u
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }
}

/// Up-looking row elimination inside the symbolic pattern.
///
/// Each multiply-add pair counts as 2 flops, each pivot division as 1. The
/// pivot threshold is `1e-14 * max|A|`; a smaller pivot means the system
/// needs pivoting or is singular.
pub fn numeric_factorize(
    a: &CsrMatrix,
    sym: &SymbolicFactorization,
) -> Result<LuFactors, DirectError> {
    let started = Instant::now();
    let n = sym.n();
    if a.n_rows() != n || a.n_cols() != n {
        return Err(DirectError::DimensionMismatch(format!(
            "matrix is {}x{}, symbolic factorization is for n={}",
            a.n_rows(),
            a.n_cols(),
            n
        )));
    }
    let perm = &sym.ordering().col_perm;
    let pa = permute(a, perm, perm)?;
    let pivot_floor = 1e-14 * pa.max_abs();

    // Stored L rows append the unit diagonal after the strictly-lower pattern.
    let mut l_row_ptr = Vec::with_capacity(n + 1);
    l_row_ptr.push(0usize);
    for i in 0..n {
        l_row_ptr.push(l_row_ptr[i] + sym.l_row(i).len() + 1);
    }
    let mut l_col_idx = vec![0usize; l_row_ptr[n]];
    let mut l_values = vec![0.0; l_row_ptr[n]];
    let u_row_ptr = sym.u_row_ptr.clone();
    let u_col_idx = sym.u_col_idx.clone();
    let mut u_values = vec![0.0; u_col_idx.len()];

    let mut work = vec![0.0; n];
    let mut flops = 0u64;
    for i in 0..n {
        // Scatter row i of the permuted matrix; its pattern is contained in
        // the symbolic prediction, so every position gets cleared below.
        let (cols, vals) = pa.row(i);
        for (c, v) in cols.iter().zip(vals) {
            debug_assert!(
                if *c < i {
                    sym.l_row(i).binary_search(c).is_ok()
                } else {
                    sym.u_row(i).binary_search(c).is_ok()
                },
                "entry ({i},{c}) outside the symbolic pattern; stale factorization?"
            );
            work[*c] = *v;
        }
        for &j in sym.l_row(i) {
            let ujj = u_values[u_row_ptr[j]];
            let lij = work[j] / ujj;
            flops += 1;
            work[j] = lij;
            let span = u_row_ptr[j] + 1..u_row_ptr[j + 1];
            for (c, uv) in u_col_idx[span.clone()].iter().zip(&u_values[span]) {
                work[*c] -= lij * uv;
                flops += 2;
            }
        }
        let uii = work[i];
        if uii.abs() <= pivot_floor {
            return Err(DirectError::ZeroPivot(i));
        }
        // Gather and clear.
        let base = l_row_ptr[i];
        for (k, &j) in sym.l_row(i).iter().enumerate() {
            l_col_idx[base + k] = j;
            l_values[base + k] = work[j];
            work[j] = 0.0;
        }
        l_col_idx[l_row_ptr[i + 1] - 1] = i;
        l_values[l_row_ptr[i + 1] - 1] = 1.0;
        let span = u_row_ptr[i]..u_row_ptr[i + 1];
        for (k, &j) in u_col_idx[span].iter().enumerate() {
            u_values[u_row_ptr[i] + k] = work[j];
            work[j] = 0.0;
        }
    }

    let l = CsrMatrix::new(n, n, l_row_ptr, l_col_idx, l_values)?;
    let u = CsrMatrix::new(n, n, u_row_ptr, u_col_idx, u_values)?;
    let fill_nnz = (l.nnz() + u.nnz()) as u64;
    let stats = FactorStats {
        fill_nnz,
        fill_density_percent: 100.0 * fill_nnz as f64 / (n as f64 * n as f64),
        factor_flops: flops,
        numeric_seconds: started.elapsed().as_secs_f64(),
        ..FactorStats::default()
    };
    Ok(LuFactors {
        l,
        u,
        perm: perm.clone(),
        stats,
    })
}

/// Solves `A x = b` from the factors: permute, forward substitution,
/// backward substitution, permute back.
pub fn lu_solve(
    f: &LuFactors,
    b: &DenseVector,
    flops: &mut FlopCounter,
) -> Result<DenseVector, DirectError> {
    let n = f.n();
    if b.len() != n {
        return Err(DirectError::DimensionMismatch(format!(
            "factors are for n={}, right-hand side has length {}",
            n,
            b.len()
        )));
    }
    if !b.is_finite() {
        return Err(DirectError::NonFiniteInput);
    }
    let mut y = f.perm.apply_vec(b);
    // Forward: L y = P b (unit diagonal stored last in each row).
    for i in 0..n {
        let (cols, vals) = f.l.row(i);
        let mut acc = y[i];
        for (c, v) in cols.iter().zip(vals) {
            if *c != i {
                acc -= v * y[*c];
            }
        }
        y[i] = acc;
    }
    flops.add(2 * (f.l.nnz() - n) as u64);
    // Backward: U z = y (diagonal stored first in each row).
    for i in (0..n).rev() {
        let (cols, vals) = f.u.row(i);
        let mut acc = y[i];
        for (c, v) in cols.iter().zip(vals).skip(1) {
            acc -= v * y[*c];
        }
        y[i] = acc / vals[0];
    }
    flops.add((2 * (f.u.nnz() - n) + n) as u64);
    Ok(f.perm.apply_inverse_vec(&y))
}

/// Solves one system per column, reusing the factorization; column `k` of
/// the result is bitwise identical to `lu_solve` on column `k` of `rhs`.
pub fn lu_solve_block(
    f: &LuFactors,
    rhs: &DenseBlock,
    flops: &mut FlopCounter,
) -> Result<DenseBlock, DirectError> {
    if rhs.n_rows() != f.n() {
        return Err(DirectError::DimensionMismatch(format!(
            "factors are for n={}, block has {} rows",
            f.n(),
            rhs.n_rows()
        )));
    }
    let mut out = DenseBlock::zeros(rhs.n_rows(), rhs.n_cols());
    for k in 0..rhs.n_cols() {
        let x = lu_solve(f, &rhs.col_vector(k), flops)?;
        out.set_col(k, &x);
    }
    Ok(out)
}
