//! BiCGSTAB and restarted GMRES under different preconditioners on the same
//! 16^3 Laplace system.
//!
//! ```bash
//! cargo run --release --example krylov_solvers
//! ```

use sparsebench::iterative::{
    bicgstab, build_block_jacobi, build_ilu0, build_jacobi, gmres, Preconditioner,
    StoppingCriterion,
};
use sparsebench::metrics::x_err;
use sparsebench::problem::{assemble_fd_laplacian, AnalyticField, RegularGrid3};
use sparsebench::sparse::DenseVector;

fn main() {
    let grid = RegularGrid3::cube(16).unwrap();
    let sys = assemble_fd_laplacian(&grid, &AnalyticField::QuadHarmonic).unwrap();
    let n = sys.matrix.n_rows();
    let stop = StoppingCriterion::new(1e-12, 10_000).unwrap();

    let preconds: Vec<(&str, Preconditioner)> = vec![
        ("none", Preconditioner::Identity),
        ("jacobi", build_jacobi(&sys.matrix).unwrap()),
        ("bjacobi p=8", build_block_jacobi(&sys.matrix, 8).unwrap()),
        ("bjacobi p=1", build_block_jacobi(&sys.matrix, 1).unwrap()),
        ("ilu0", build_ilu0(&sys.matrix).unwrap()),
    ];

    println!(
        "16^3 system, eps = 1e-12\n{:<14} {:>10} {:>6} {:>12} {:>12} {:>12}",
        "precond", "solver", "iters", "residual", "x_err", "Mflops"
    );
    for (name, m) in &preconds {
        let (x, log) = bicgstab(&sys.matrix, &sys.rhs, m, &stop, &DenseVector::zeros(n)).unwrap();
        print_row(
            name,
            "bicgstab",
            &log,
            x_err(&sys.ground_truth, &x).unwrap(),
        );

        let (x, log) = gmres(&sys.matrix, &sys.rhs, m, &stop, 30).unwrap();
        print_row(
            name,
            "gmres(30)",
            &log,
            x_err(&sys.ground_truth, &x).unwrap(),
        );
    }
}

fn print_row(precond: &str, solver: &str, log: &sparsebench::iterative::IterationLog, err: f64) {
    println!(
        "{:<14} {:>10} {:>6} {:>12.3e} {:>12.3e} {:>12.1}",
        precond,
        solver,
        log.iterations,
        log.final_residual,
        err,
        log.solve_flops as f64 / 1e6
    );
}
