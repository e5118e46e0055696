//! Crossover in the number of right-hand sides: measure the four phase
//! times, compute the empirical t0, and print the two cost lines.
//!
//! ```bash
//! cargo run --release --example multi_rhs_crossover
//! ```

use sparsebench::advisor::{empirical_t0, CrossoverEstimate, CrossoverInput};
use sparsebench::direct::{
    lu_solve_block, minimum_degree_order, numeric_factorize, symbolic_factorize,
};
use sparsebench::iterative::{bicgstab, build_jacobi, StoppingCriterion};
use sparsebench::problem::{assemble_fd_laplacian, make_rhs_family, AnalyticField, RegularGrid3};
use sparsebench::sparse::DenseVector;
use sparsebench::FlopCounter;
use std::time::Instant;

fn main() {
    let grid = RegularGrid3::cube(16).unwrap();
    let sys = assemble_fd_laplacian(&grid, &AnalyticField::QuadHarmonic).unwrap();
    let n = sys.matrix.n_rows();
    let t = 16;
    let family = make_rhs_family(&sys, t).unwrap();

    // Direct: one factorization, then one cheap solve per column.
    let clock = Instant::now();
    let ord = minimum_degree_order(&sys.matrix).unwrap();
    let symb = symbolic_factorize(&sys.matrix, &ord).unwrap();
    let factors = numeric_factorize(&sys.matrix, &symb).unwrap();
    let t_fact = clock.elapsed().as_secs_f64();
    let clock = Instant::now();
    let _ = lu_solve_block(&factors, &family.rhs, &mut FlopCounter::new()).unwrap();
    let t_slu_solve = clock.elapsed().as_secs_f64() / t as f64;

    // Iterative: one preconditioner, then a full Krylov solve per column.
    let clock = Instant::now();
    let m = build_jacobi(&sys.matrix).unwrap();
    let t_pc = clock.elapsed().as_secs_f64();
    let stop = StoppingCriterion::new(1e-10, 10_000).unwrap();
    let clock = Instant::now();
    for k in 0..t {
        let b = family.rhs.col_vector(k);
        let (_, log) = bicgstab(&sys.matrix, &b, &m, &stop, &DenseVector::zeros(n)).unwrap();
        assert!(log.converged);
    }
    let t_is_solve = clock.elapsed().as_secs_f64() / t as f64;

    println!("measured phases on the 16^3 system (seconds):");
    println!("  T_fact      = {t_fact:.5}");
    println!("  T_slu_solve = {t_slu_solve:.6} per rhs");
    println!("  T_pc        = {t_pc:.6}");
    println!("  T_is_solve  = {t_is_solve:.6} per rhs\n");

    let input = CrossoverInput::new(t_fact, t_slu_solve, t_pc, t_is_solve).unwrap();
    match empirical_t0(&input) {
        CrossoverEstimate::Finite(t0) => {
            println!("empirical t0 = {t0:.2} right-hand sides\n");
            println!("{:>6} {:>12} {:>12}", "t", "direct[s]", "iterative[s]");
            for i in [1, 2, 4, 8, 16, 32, 64, 128, 256] {
                let d = t_fact + i as f64 * t_slu_solve;
                let it = t_pc + i as f64 * t_is_solve;
                let marker = if (i as f64) > t0 {
                    "  <- direct wins"
                } else {
                    ""
                };
                println!("{:>6} {:>12.5} {:>12.5}{}", i, d, it, marker);
            }
        }
        CrossoverEstimate::IterativeAlwaysFaster => {
            println!("iterative is faster for every number of right-hand sides");
        }
        CrossoverEstimate::DirectAlwaysFaster => {
            println!("direct is faster for every number of right-hand sides");
        }
    }
}
