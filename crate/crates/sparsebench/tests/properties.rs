//! Property tests for the algebraic invariants.

use proptest::prelude::*;
use sparsebench::advisor::{empirical_t0, CrossoverEstimate, CrossoverInput};
use sparsebench::metrics::x_err;
use sparsebench::sparse::{axpy, permute, spmv, CooTriplets, DenseVector, Permutation};
use sparsebench::FlopCounter;

/// Random small sparse matrix as (n, entries).
fn small_matrix() -> impl Strategy<Value = (usize, Vec<(usize, usize, f64)>)> {
    (2usize..12).prop_flat_map(|n| {
        let entry = (0..n, 0..n, -2.0..2.0f64).prop_map(|(i, j, v)| (i, j, v));
        (Just(n), proptest::collection::vec(entry, 1..40))
    })
}

/// Permutation from sort keys: indices ordered by `(key, index)`.
fn permutation_from_keys(n: usize, keys: &[u64]) -> Permutation {
    let mut forward: Vec<usize> = (0..n).collect();
    forward.sort_by_key(|&i| (keys[i % keys.len()], i));
    Permutation::from_forward(forward).unwrap()
}

proptest! {
    #[test]
    fn spmv_is_linear((n, entries) in small_matrix(),
                      seed in proptest::collection::vec(-3.0..3.0f64, 24),
                      a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let mut t = CooTriplets::new(n, n);
        for (i, j, v) in entries {
            t.push(i, j, v);
        }
        let m = t.to_csr().unwrap();
        let x = DenseVector::from_fn(n, |i| seed[i % seed.len()]);
        let y = DenseVector::from_fn(n, |i| seed[(i + 7) % seed.len()]);
        let mut f = FlopCounter::new();
        let combo = DenseVector::from_fn(n, |i| a * x[i] + b * y[i]);
        let lhs = spmv(&m, &combo, &mut f).unwrap();
        let mx = spmv(&m, &x, &mut f).unwrap();
        let my = spmv(&m, &y, &mut f).unwrap();
        let rhs = axpy(a, &mx, &axpy(b, &my, &DenseVector::zeros(n), &mut f).unwrap(), &mut f).unwrap();
        for i in 0..n {
            let scale = lhs[i].abs().max(rhs[i].abs()).max(1.0);
            prop_assert!((lhs[i] - rhs[i]).abs() <= 1e-13 * scale);
        }
    }

    #[test]
    fn permute_round_trip_is_identity((n, entries) in small_matrix(),
                                      row_keys in proptest::collection::vec(any::<u64>(), 12),
                                      col_keys in proptest::collection::vec(any::<u64>(), 12)) {
        let mut t = CooTriplets::new(n, n);
        for (i, j, v) in entries {
            t.push(i, j, v);
        }
        let m = t.to_csr().unwrap();
        let p = permutation_from_keys(n, &row_keys);
        let q = permutation_from_keys(n, &col_keys);
        let shuffled = permute(&m, &p, &q).unwrap();
        let back = permute(&shuffled, &p.inverse(), &q.inverse()).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn x_err_is_scale_invariant(values in proptest::collection::vec(-5.0..5.0f64, 2..20),
                                noise in proptest::collection::vec(-0.5..0.5f64, 20),
                                c in prop_oneof![(-1e6..-1e-6f64), (1e-6..1e6f64)]) {
        let n = values.len();
        prop_assume!(values.iter().any(|v| *v != 0.0));
        let gt = DenseVector::from_vec(values.clone());
        let comp = DenseVector::from_fn(n, |i| values[i] + noise[i % noise.len()]);
        let base = x_err(&gt, &comp).unwrap();
        let gts = DenseVector::from_fn(n, |i| c * gt[i]);
        let comps = DenseVector::from_fn(n, |i| c * comp[i]);
        let scaled = x_err(&gts, &comps).unwrap();
        prop_assert!((scaled - base).abs() <= 1e-15 * base.max(1.0));
    }

    #[test]
    fn empirical_t0_balances_the_two_cost_lines(t_fact in 0.0..100.0f64,
                                                t_slu in 0.0..2.0f64,
                                                t_pc in 0.0..100.0f64,
                                                t_is in 0.0..2.0f64) {
        let c = CrossoverInput::new(t_fact, t_slu, t_pc, t_is).unwrap();
        match empirical_t0(&c) {
            CrossoverEstimate::Finite(t0) => {
                prop_assert!(t0 > 0.0);
                let direct = t_fact + t0 * t_slu;
                let iterative = t_pc + t0 * t_is;
                let scale = direct.abs().max(iterative.abs()).max(1e-300);
                prop_assert!((direct - iterative).abs() <= 1e-12 * scale);
            }
            CrossoverEstimate::IterativeAlwaysFaster => {
                // Iterative line at or below the direct line at t = 0 and in slope.
                prop_assert!(t_pc <= t_fact && t_is <= t_slu);
            }
            CrossoverEstimate::DirectAlwaysFaster => {
                prop_assert!(t_fact <= t_pc || t_is > t_slu);
            }
        }
    }
}
