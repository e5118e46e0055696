//! Cross-module solves: problem generation feeding both solver families.

use sparsebench::direct::{
    lu_solve, lu_solve_block, minimum_degree_order, numeric_factorize, symbolic_factorize,
};
use sparsebench::iterative::{bicgstab, build_block_jacobi, Preconditioner, StoppingCriterion};
use sparsebench::metrics::x_err;
use sparsebench::problem::{
    assemble_fd_laplacian, assemble_fem_laplacian, generate_jittered_tet_mesh, make_rhs_family,
    AnalyticField, RegularGrid3,
};
use sparsebench::sparse::DenseVector;
use sparsebench::FlopCounter;

#[test]
fn direct_block_solve_of_the_rhs_family_is_exact_per_column() {
    let grid = RegularGrid3::cube(12).unwrap();
    let sys = assemble_fd_laplacian(&grid, &AnalyticField::QuadHarmonic).unwrap();
    let family = make_rhs_family(&sys, 8).unwrap();
    let ord = minimum_degree_order(&sys.matrix).unwrap();
    let symb = symbolic_factorize(&sys.matrix, &ord).unwrap();
    let f = numeric_factorize(&sys.matrix, &symb).unwrap();
    let x = lu_solve_block(&f, &family.rhs, &mut FlopCounter::new()).unwrap();
    for k in 0..8 {
        // Linear boundary fields are reproduced by the stencil exactly.
        let err = x_err(&family.ground_truth.col_vector(k), &x.col_vector(k)).unwrap();
        assert!(err <= 1e-10, "column {k}: x_err {err}");
    }
}

#[test]
fn unjittered_mesh_solves_linear_fields_exactly() {
    let mesh = generate_jittered_tet_mesh(4, 0.0, 1).unwrap();
    let field = AnalyticField::Linear {
        a: -0.75,
        b: 1.5,
        c: 2.0,
        d: -0.125,
    };
    let sys = assemble_fem_laplacian(&mesh, &field, false).unwrap();
    let ord = minimum_degree_order(&sys.matrix).unwrap();
    let symb = symbolic_factorize(&sys.matrix, &ord).unwrap();
    let f = numeric_factorize(&sys.matrix, &symb).unwrap();
    let x = lu_solve(&f, &sys.rhs, &mut FlopCounter::new()).unwrap();
    let err = x_err(&sys.ground_truth, &x).unwrap();
    assert!(err <= 1e-10, "x_err {err}");
}

#[test]
fn mass_scaled_system_solves_the_same_solution() {
    let mesh = generate_jittered_tet_mesh(4, 0.2, 3).unwrap();
    let field = AnalyticField::Linear {
        a: 1.0,
        b: -2.0,
        c: 0.5,
        d: 0.0,
    };
    let sys = assemble_fem_laplacian(&mesh, &field, true).unwrap();
    let ord = minimum_degree_order(&sys.matrix).unwrap();
    let symb = symbolic_factorize(&sys.matrix, &ord).unwrap();
    let f = numeric_factorize(&sys.matrix, &symb).unwrap();
    let x = lu_solve(&f, &sys.rhs, &mut FlopCounter::new()).unwrap();
    let err = x_err(&sys.ground_truth, &x).unwrap();
    assert!(err <= 1e-10, "x_err {err}");
}

#[test]
fn exact_block_preconditioner_converges_within_two_iterations_on_fd_grid() {
    let grid = RegularGrid3::cube(16).unwrap();
    let sys = assemble_fd_laplacian(&grid, &AnalyticField::QuadHarmonic).unwrap();
    let n = sys.matrix.n_rows();
    let m = build_block_jacobi(&sys.matrix, 1).unwrap();
    let stop = StoppingCriterion::new(1e-12, 100).unwrap();
    let (x, log) = bicgstab(&sys.matrix, &sys.rhs, &m, &stop, &DenseVector::zeros(n)).unwrap();
    assert!(log.converged);
    assert!(log.iterations <= 2, "took {} iterations", log.iterations);
    assert!(x_err(&sys.ground_truth, &x).unwrap() <= 1e-10);
}

#[test]
fn shared_factors_support_concurrent_solves() {
    fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<sparsebench::sparse::CsrMatrix>();
    assert_send_sync::<sparsebench::direct::LuFactors>();
    assert_send_sync::<Preconditioner>();

    let grid = RegularGrid3::cube(8).unwrap();
    let sys = assemble_fd_laplacian(&grid, &AnalyticField::QuadHarmonic).unwrap();
    let ord = minimum_degree_order(&sys.matrix).unwrap();
    let symb = symbolic_factorize(&sys.matrix, &ord).unwrap();
    let f = std::sync::Arc::new(numeric_factorize(&sys.matrix, &symb).unwrap());
    let family = make_rhs_family(&sys, 4).unwrap();

    let mut handles = Vec::new();
    for k in 0..4 {
        let f = f.clone();
        let b = family.rhs.col_vector(k);
        handles.push(std::thread::spawn(move || {
            lu_solve(&f, &b, &mut FlopCounter::new()).unwrap()
        }));
    }
    let concurrent: Vec<DenseVector> = handles.into_iter().map(|h| h.join().unwrap()).collect();
    for (k, x) in concurrent.iter().enumerate() {
        let serial = lu_solve(&f, &family.rhs.col_vector(k), &mut FlopCounter::new()).unwrap();
        assert_eq!(x, &serial);
    }
}

#[test]
fn weaker_block_preconditioner_needs_more_iterations() {
    let grid = RegularGrid3::cube(16).unwrap();
    let sys = assemble_fd_laplacian(&grid, &AnalyticField::QuadHarmonic).unwrap();
    let n = sys.matrix.n_rows();
    let stop = StoppingCriterion::new(1e-12, 10_000).unwrap();
    let run = |m: &Preconditioner| {
        let (_, log) = bicgstab(&sys.matrix, &sys.rhs, m, &stop, &DenseVector::zeros(n)).unwrap();
        assert!(log.converged);
        log.iterations
    };
    let strong = run(&build_block_jacobi(&sys.matrix, 1).unwrap());
    let weak = run(&build_block_jacobi(&sys.matrix, 256).unwrap());
    assert!(strong < weak, "p=1 took {strong}, p=256 took {weak}");
}
