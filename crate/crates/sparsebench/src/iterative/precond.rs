//! Preconditioners: Jacobi, block-Jacobi, ILU(0).

use super::IterativeError;
use crate::direct::{
    lu_solve, minimum_degree_order, numeric_factorize, symbolic_factorize, LuFactors,
};
use crate::flops::FlopCounter;
use crate::sparse::{CooTriplets, CsrMatrix, DenseVector};

/// Right preconditioner `M^{-1}` applied as `z = M^{-1} r`.
///
/// `BlockJacobi` with one block applies the exact inverse (a full LU of the
/// matrix); with `n` blocks it degenerates to point Jacobi. `Ilu0` keeps
/// exactly the sparsity pattern of the input matrix.
#[derive(Debug, Clone)]
pub enum Preconditioner {
    Identity,
    Jacobi {
        inv_diag: Vec<f64>,
    },
    BlockJacobi {
        /// Start row of each block and the LU factors of its diagonal block.
        blocks: Vec<(usize, LuFactors)>,
        n: usize,
    },
    Ilu0 {
        /// Combined factors on the pattern of `A`: strictly-below entries are
        /// `L` (unit diagonal implicit), diagonal and above are `U`.
        factors: CsrMatrix,
    },
}

impl Preconditioner {
    pub fn name(&self) -> &'static str {
        match self {
            Preconditioner::Identity => "none",
            Preconditioner::Jacobi { .. } => "jacobi",
            Preconditioner::BlockJacobi { .. } => "bjacobi",
            Preconditioner::Ilu0 { .. } => "ilu0",
        }
    }

    pub fn block_count(&self) -> Option<usize> {
        match self {
            Preconditioner::BlockJacobi { blocks, .. } => Some(blocks.len()),
            _ => None,
        }
    }

    /// `z = M^{-1} r`.
    pub fn apply(
        &self,
        r: &DenseVector,
        flops: &mut FlopCounter,
    ) -> Result<DenseVector, IterativeError> {
        match self {
            Preconditioner::Identity => Ok(r.clone()),
            Preconditioner::Jacobi { inv_diag } => {
                if inv_diag.len() != r.len() {
                    return Err(IterativeError::DimensionMismatch(format!(
                        "preconditioner is for n={}, vector has length {}",
                        inv_diag.len(),
                        r.len()
                    )));
                }
                let z = DenseVector::from_fn(r.len(), |i| inv_diag[i] * r[i]);
                flops.add(r.len() as u64);
                Ok(z)
            }
            Preconditioner::BlockJacobi { blocks, n } => {
                if *n != r.len() {
                    return Err(IterativeError::DimensionMismatch(format!(
                        "preconditioner is for n={n}, vector has length {}",
                        r.len()
                    )));
                }
                let mut z = DenseVector::zeros(*n);
                for (start, factors) in blocks {
                    let len = factors.n();
                    let sub = DenseVector::from_vec(r.as_slice()[*start..*start + len].to_vec());
                    let x = lu_solve(factors, &sub, flops)?;
                    z.as_mut_slice()[*start..*start + len].copy_from_slice(x.as_slice());
                }
                Ok(z)
            }
            Preconditioner::Ilu0 { factors } => {
                let n = factors.n_rows();
                if n != r.len() {
                    return Err(IterativeError::DimensionMismatch(format!(
                        "preconditioner is for n={n}, vector has length {}",
                        r.len()
                    )));
                }
                let mut y = r.clone();
                // Forward sweep with the strictly-lower entries.
                for i in 0..n {
                    let (cols, vals) = factors.row(i);
                    let mut acc = y[i];
                    for (c, v) in cols.iter().zip(vals) {
                        if *c >= i {
                            break;
                        }
                        acc -= v * y[*c];
                    }
                    y[i] = acc;
                }
                // Backward sweep with the diagonal and above.
                for i in (0..n).rev() {
                    let (cols, vals) = factors.row(i);
                    let mut acc = y[i];
                    let mut diag = 0.0;
                    for (c, v) in cols.iter().zip(vals) {
                        if *c < i {
                            continue;
                        }
                        if *c == i {
                            diag = *v;
                        } else {
                            acc -= v * y[*c];
                        }
                    }
                    y[i] = acc / diag;
                }
                flops.add((2 * (factors.nnz() - n) + n) as u64);
                Ok(y)
            }
        }
    }
}

/// Point Jacobi: stores the inverted diagonal.
pub fn build_jacobi(a: &CsrMatrix) -> Result<Preconditioner, IterativeError> {
    let n = a.n_rows();
    let mut inv_diag = Vec::with_capacity(n);
    for i in 0..n {
        match a.get(i, i) {
            Some(d) if d != 0.0 => inv_diag.push(1.0 / d),
            _ => return Err(IterativeError::ZeroDiagonal(i)),
        }
    }
    Ok(Preconditioner::Jacobi { inv_diag })
}

/// Block-Jacobi with `p` contiguous row blocks of near-equal size (the first
/// `n mod p` blocks are one row larger). Each diagonal block is LU-factored
/// with a minimum-degree ordering.
pub fn build_block_jacobi(a: &CsrMatrix, p: usize) -> Result<Preconditioner, IterativeError> {
    let n = a.n_rows();
    if p == 0 || p > n {
        return Err(IterativeError::InvalidBlockCount { blocks: p, n });
    }
    let base = n / p;
    let rem = n % p;
    let mut blocks = Vec::with_capacity(p);
    let mut start = 0usize;
    for b in 0..p {
        let len = base + usize::from(b < rem);
        let mut t = CooTriplets::new(len, len);
        for i in start..start + len {
            let (cols, vals) = a.row(i);
            for (c, v) in cols.iter().zip(vals) {
                if *c >= start && *c < start + len {
                    t.push(i - start, c - start, *v);
                }
            }
        }
        let block = t.to_csr()?;
        let ord = minimum_degree_order(&block)?;
        let sym = symbolic_factorize(&block, &ord)?;
        let factors = numeric_factorize(&block, &sym)?;
        blocks.push((start, factors));
        start += len;
    }
    Ok(Preconditioner::BlockJacobi { blocks, n })
}

/// ILU(0): incomplete factorization restricted to the sparsity pattern of
/// `A`. Stored in a single CSR with the pattern of `A`; the unit diagonal of
/// `L` is implicit.
pub fn build_ilu0(a: &CsrMatrix) -> Result<Preconditioner, IterativeError> {
    let n = a.n_rows();
    let pivot_floor = 1e-14 * a.max_abs();
    for i in 0..n {
        if a.get(i, i).is_none() {
            return Err(IterativeError::ZeroDiagonal(i));
        }
    }
    let mut factors = a.clone();
    // Row-wise IKJ elimination confined to existing positions.
    for i in 0..n {
        let row_cols: Vec<usize> = factors.row(i).0.to_vec();
        for (pos_k, &k) in row_cols.iter().enumerate() {
            if k >= i {
                break;
            }
            let ukk = factors.get(k, k).expect("diagonal checked above");
            if ukk.abs() <= pivot_floor {
                return Err(IterativeError::Direct(
                    crate::direct::DirectError::ZeroPivot(k),
                ));
            }
            let lik = factors.get(i, k).unwrap() / ukk;
            set_entry(&mut factors, i, k, lik);
            for &j in &row_cols[pos_k + 1..] {
                if let Some(ukj) = factors.get(k, j) {
                    let old = factors.get(i, j).unwrap();
                    set_entry(&mut factors, i, j, old - lik * ukj);
                }
            }
        }
        let diag = factors.get(i, i).expect("diagonal checked above");
        if diag.abs() <= pivot_floor {
            return Err(IterativeError::Direct(
                crate::direct::DirectError::ZeroPivot(i),
            ));
        }
    }
    Ok(Preconditioner::Ilu0 { factors })
}

fn set_entry(m: &mut CsrMatrix, i: usize, j: usize, value: f64) {
    let (cols, _) = m.row(i);
    let k = cols.binary_search(&j).expect("entry exists in pattern");
    let offset = m.row_ptr()[i] + k;
    m.values_mut()[offset] = value;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::direct::natural_order;
    use crate::problem::{assemble_fd_laplacian, AnalyticField, RegularGrid3};

    fn diag_matrix(values: &[f64]) -> CsrMatrix {
        let mut t = CooTriplets::new(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            t.push(i, i, *v);
        }
        t.to_csr().unwrap()
    }

    fn tridiagonal(n: usize) -> CsrMatrix {
        let mut t = CooTriplets::new(n, n);
        for i in 0..n {
            t.push(i, i, 2.0 + i as f64 * 0.1);
            if i > 0 {
                t.push(i, i - 1, -1.0);
            }
            if i + 1 < n {
                t.push(i, i + 1, -0.7);
            }
        }
        t.to_csr().unwrap()
    }

    #[test]
    fn jacobi_inverts_the_diagonal() {
        let m = build_jacobi(&diag_matrix(&[2.0, 4.0])).unwrap();
        let z = m
            .apply(
                &DenseVector::from_vec(vec![2.0, 4.0]),
                &mut FlopCounter::new(),
            )
            .unwrap();
        assert_eq!(z.as_slice(), &[1.0, 1.0]);
    }

    #[test]
    fn jacobi_identity_is_identity() {
        let m = build_jacobi(&CsrMatrix::identity(3)).unwrap();
        let r = DenseVector::from_vec(vec![1.0, -2.0, 0.5]);
        assert_eq!(m.apply(&r, &mut FlopCounter::new()).unwrap(), r);
    }

    #[test]
    fn jacobi_rejects_zero_diagonal() {
        assert!(matches!(
            build_jacobi(&diag_matrix(&[1.0, 0.0])),
            Err(IterativeError::ZeroDiagonal(1))
        ));
    }

    #[test]
    fn block_jacobi_with_n_blocks_acts_like_jacobi() {
        let a = tridiagonal(6);
        let jac = build_jacobi(&a).unwrap();
        let blk = build_block_jacobi(&a, 6).unwrap();
        let r = DenseVector::from_fn(6, |i| (i as f64 - 2.5) * 1.3);
        let zj = jac.apply(&r, &mut FlopCounter::new()).unwrap();
        let zb = blk.apply(&r, &mut FlopCounter::new()).unwrap();
        for i in 0..6 {
            assert!((zj[i] - zb[i]).abs() <= 1e-15 * zj[i].abs());
        }
    }

    #[test]
    fn block_jacobi_single_block_matches_direct_solve() {
        let grid = RegularGrid3::cube(4).unwrap();
        let sys = assemble_fd_laplacian(&grid, &AnalyticField::QuadHarmonic).unwrap();
        let m = build_block_jacobi(&sys.matrix, 1).unwrap();
        let z = m.apply(&sys.rhs, &mut FlopCounter::new()).unwrap();
        let ord = minimum_degree_order(&sys.matrix).unwrap();
        let sym = symbolic_factorize(&sys.matrix, &ord).unwrap();
        let f = numeric_factorize(&sys.matrix, &sym).unwrap();
        let direct = lu_solve(&f, &sys.rhs, &mut FlopCounter::new()).unwrap();
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..z.len() {
            num += (z[i] - direct[i]) * (z[i] - direct[i]);
            den += direct[i] * direct[i];
        }
        assert!(num.sqrt() <= 1e-12 * den.sqrt());
    }

    #[test]
    fn block_sizes_split_near_equal() {
        let a = tridiagonal(7);
        let m = build_block_jacobi(&a, 3).unwrap();
        let Preconditioner::BlockJacobi { blocks, .. } = &m else {
            panic!()
        };
        let sizes: Vec<usize> = blocks.iter().map(|(_, f)| f.n()).collect();
        assert_eq!(sizes, vec![3, 2, 2]);
        assert!(matches!(
            build_block_jacobi(&a, 0),
            Err(IterativeError::InvalidBlockCount { .. })
        ));
        assert!(matches!(
            build_block_jacobi(&a, 8),
            Err(IterativeError::InvalidBlockCount { .. })
        ));
    }

    #[test]
    fn ilu0_pattern_equals_input_pattern() {
        let grid = RegularGrid3::cube(4).unwrap();
        let sys = assemble_fd_laplacian(&grid, &AnalyticField::QuadHarmonic).unwrap();
        let m = build_ilu0(&sys.matrix).unwrap();
        let Preconditioner::Ilu0 { factors } = &m else {
            panic!()
        };
        assert_eq!(factors.row_ptr(), sys.matrix.row_ptr());
        assert_eq!(factors.col_idx(), sys.matrix.col_idx());
    }

    #[test]
    fn ilu0_on_tridiagonal_equals_exact_lu() {
        // A tridiagonal elimination creates no fill, so the incomplete
        // factors coincide with the exact ones.
        let a = tridiagonal(8);
        let m = build_ilu0(&a).unwrap();
        let sym = symbolic_factorize(&a, &natural_order(&a).unwrap()).unwrap();
        let f = numeric_factorize(&a, &sym).unwrap();
        let Preconditioner::Ilu0 { factors } = &m else {
            panic!()
        };
        for i in 0..8 {
            let (cols, vals) = factors.row(i);
            for (c, v) in cols.iter().zip(vals) {
                let exact = if *c < i {
                    f.l().get(i, *c).unwrap()
                } else {
                    f.u().get(i, *c).unwrap()
                };
                assert!((v - exact).abs() < 1e-14, "({i},{c}): {v} vs {exact}");
            }
        }
    }

    #[test]
    fn ilu0_identity_factors_are_identity() {
        let m = build_ilu0(&CsrMatrix::identity(5)).unwrap();
        let r = DenseVector::from_fn(5, |i| i as f64 + 1.0);
        assert_eq!(m.apply(&r, &mut FlopCounter::new()).unwrap(), r);
    }

    #[test]
    fn preconditioner_apply_is_linear() {
        let a = tridiagonal(9);
        for m in [
            build_jacobi(&a).unwrap(),
            build_block_jacobi(&a, 3).unwrap(),
            build_ilu0(&a).unwrap(),
        ] {
            let x = DenseVector::from_fn(9, |i| (i as f64).sin() + 1.5);
            let y = DenseVector::from_fn(9, |i| (i as f64 * 0.7).cos() - 0.3);
            let (alpha, beta) = (1.75, -0.4);
            let mut f = FlopCounter::new();
            let combo = DenseVector::from_fn(9, |i| alpha * x[i] + beta * y[i]);
            let lhs = m.apply(&combo, &mut f).unwrap();
            let mx = m.apply(&x, &mut f).unwrap();
            let my = m.apply(&y, &mut f).unwrap();
            for i in 0..9 {
                let rhs = alpha * mx[i] + beta * my[i];
                let scale = rhs.abs().max(1.0);
                assert!(
                    (lhs[i] - rhs).abs() <= 1e-13 * scale,
                    "{}: {} vs {}",
                    m.name(),
                    lhs[i],
                    rhs
                );
            }
        }
    }
}
