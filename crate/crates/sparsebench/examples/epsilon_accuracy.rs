//! How the exit threshold of the iterative solver trades off against the
//! achieved solution error, compared with a direct solve of the same system.
//!
//! ```bash
//! cargo run --release --example epsilon_accuracy
//! ```

use sparsebench::direct::{lu_solve, numeric_factorize, symbolic_factorize, OrderingMethod};
use sparsebench::iterative::{bicgstab, build_block_jacobi, StoppingCriterion};
use sparsebench::metrics::x_err;
use sparsebench::problem::{assemble_fd_laplacian, AnalyticField, RegularGrid3};
use sparsebench::sparse::DenseVector;
use sparsebench::FlopCounter;

fn main() {
    let grid = RegularGrid3::cube(16).unwrap();
    let sys = assemble_fd_laplacian(&grid, &AnalyticField::QuadHarmonic).unwrap();
    let n = sys.matrix.n_rows();

    // Direct reference: accuracy at round-off level.
    let ord = OrderingMethod::MinimumDegree.order(&sys.matrix).unwrap();
    let symb = symbolic_factorize(&sys.matrix, &ord).unwrap();
    let factors = numeric_factorize(&sys.matrix, &symb).unwrap();
    let xd = lu_solve(&factors, &sys.rhs, &mut FlopCounter::new()).unwrap();
    println!(
        "direct solve reference: x_err = {:.3e}\n",
        x_err(&sys.ground_truth, &xd).unwrap()
    );

    let m = build_block_jacobi(&sys.matrix, 8).unwrap();
    println!(
        "bicgstab + bjacobi(8):\n{:>8} {:>8} {:>12} {:>12} {:>10}",
        "eps", "iters", "residual", "x_err", "time[ms]"
    );
    for eps in [1e-4, 1e-6, 1e-8, 1e-10, 1e-12, 1e-15] {
        let stop = StoppingCriterion::new(eps, 10_000).unwrap();
        let (x, log) = bicgstab(&sys.matrix, &sys.rhs, &m, &stop, &DenseVector::zeros(n)).unwrap();
        println!(
            "{:>8.0e} {:>8} {:>12.3e} {:>12.3e} {:>10.2}{}",
            eps,
            log.iterations,
            log.final_residual,
            x_err(&sys.ground_truth, &x).unwrap(),
            log.solve_seconds * 1e3,
            if log.converged { "" } else { "  (cap hit)" }
        );
    }
    println!("\ntightening eps drives x_err towards the direct-solve level");
}
