//! Acceptance suite: one test per criterion, each printing a PASS line
//! (visible with `cargo test --test acceptance -- --nocapture`).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sparsebench::advisor::{
    analytic_t0, empirical_t0, recommend, Choice, CostModelInput, CrossoverEstimate,
    CrossoverInput, Requirements,
};
use sparsebench::direct::{
    lu_solve, lu_solve_block, minimum_degree_order, natural_order, numeric_factorize,
    symbolic_factorize, LuFactors,
};
use sparsebench::iterative::{
    bicgstab, build_block_jacobi, build_ilu0, build_jacobi, gmres, Preconditioner,
    StoppingCriterion,
};
use sparsebench::metrics::{memory_estimate, x_err};
use sparsebench::problem::{
    assemble_cotangent_matrix, assemble_fd_laplacian, assemble_fem_laplacian, fd_laplacian_nnz,
    generate_jittered_tet_mesh, make_rhs_family, AnalyticField, AssembledSystem, RegularGrid3,
};
use sparsebench::sparse::{permute, CooTriplets, CsrMatrix, DenseVector};
use sparsebench::FlopCounter;
use std::time::Instant;

fn cube_system(n: usize, field: AnalyticField) -> AssembledSystem {
    let grid = RegularGrid3::cube(n).unwrap();
    assemble_fd_laplacian(&grid, &field).unwrap()
}

/// `||P A P^T - L U||_F / ||A||_F` via a sparse row-by-row product.
fn lu_relative_error(a: &CsrMatrix, f: &LuFactors) -> f64 {
    let pa = permute(a, f.perm(), f.perm()).unwrap();
    let n = a.n_rows();
    let mut work = vec![0.0f64; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut diff_sq = 0.0;
    for i in 0..n {
        touched.clear();
        let (lcols, lvals) = f.l().row(i);
        for (lj, lv) in lcols.iter().zip(lvals) {
            let (ucols, uvals) = f.u().row(*lj);
            for (uc, uv) in ucols.iter().zip(uvals) {
                if work[*uc] == 0.0 {
                    touched.push(*uc);
                }
                work[*uc] += lv * uv;
            }
        }
        let (acols, avals) = pa.row(i);
        for (c, v) in acols.iter().zip(avals) {
            if work[*c] == 0.0 {
                touched.push(*c);
            }
            work[*c] -= v;
        }
        for &c in &touched {
            diff_sq += work[c] * work[c];
            work[c] = 0.0;
        }
    }
    diff_sq.sqrt() / a.frobenius_norm()
}

/// Random sparse diagonally dominant matrix with an unsymmetric pattern.
#[allow(clippy::needless_range_loop)]
fn random_sparse(n: usize, rng: &mut ChaCha8Rng) -> CsrMatrix {
    let mut t = CooTriplets::new(n, n);
    let mut row_abs = vec![0.0f64; n];
    for i in 0..n {
        for _ in 0..4 {
            let j = rng.gen_range(0..n);
            if j == i {
                continue;
            }
            let v: f64 = rng.gen_range(-1.0..1.0);
            t.push(i, j, v);
            row_abs[i] += v.abs();
        }
    }
    for i in 0..n {
        t.push(i, i, row_abs[i] + 1.0 + rng.gen_range(0.0..1.0));
    }
    t.to_csr().unwrap()
}

#[test]
fn criterion_01_table_nonzero_reproduction() {
    for n in [16usize, 32] {
        let sys = cube_system(n, AnalyticField::QuadHarmonic);
        assert_eq!(sys.matrix.nnz() as u64, fd_laplacian_nnz(n, n, n));
    }
    assert_eq!(fd_laplacian_nnz(128, 128, 128), 14_099_408);
    assert_eq!(fd_laplacian_nnz(256, 256, 256), 115_099_600);
    assert_eq!(fd_laplacian_nnz(512, 512, 512), 930_123_728);
    println!("ACCEPTANCE 1: PASS - assembled nnz matches the closed form; 128/256/512 grids hit the published counts exactly");
}

#[test]
fn criterion_02_lu_correctness_oracle() {
    let sys = cube_system(16, AnalyticField::QuadHarmonic);
    let ord = minimum_degree_order(&sys.matrix).unwrap();
    let symb = symbolic_factorize(&sys.matrix, &ord).unwrap();
    let f = numeric_factorize(&sys.matrix, &symb).unwrap();
    let err = lu_relative_error(&sys.matrix, &f);
    assert!(err <= 1e-12, "16^3 grid: factor error {err}");

    let mut rng = ChaCha8Rng::seed_from_u64(20_240_901);
    for case in 0..20 {
        let n = rng.gen_range(20..=500);
        let a = random_sparse(n, &mut rng);
        let ord = if case % 2 == 0 {
            minimum_degree_order(&a).unwrap()
        } else {
            natural_order(&a).unwrap()
        };
        let symb = symbolic_factorize(&a, &ord).unwrap();
        let f = numeric_factorize(&a, &symb).unwrap();
        let err = lu_relative_error(&a, &f);
        assert!(err <= 1e-12, "case {case} (n={n}): factor error {err}");
    }
    println!("ACCEPTANCE 2: PASS - ||PAP^T - LU||_F / ||A||_F <= 1e-12 on the 16^3 grid and 20 random sparse matrices");
}

#[test]
fn criterion_03_direct_solver_accuracy() {
    let sys = cube_system(16, AnalyticField::QuadHarmonic);
    let ord = minimum_degree_order(&sys.matrix).unwrap();
    let symb = symbolic_factorize(&sys.matrix, &ord).unwrap();
    let f = numeric_factorize(&sys.matrix, &symb).unwrap();
    let x = lu_solve(&f, &sys.rhs, &mut FlopCounter::new()).unwrap();
    let err = x_err(&sys.ground_truth, &x).unwrap();
    assert!(err <= 1e-10, "direct x_err {err}");
    println!("ACCEPTANCE 3: PASS - direct solve of the 16^3 harmonic-quadratic problem has x_err {err:.3e} <= 1e-10");
}

#[test]
fn criterion_04_iterative_exit_contract() {
    let sys = cube_system(16, AnalyticField::QuadHarmonic);
    let m = build_ilu0(&sys.matrix).unwrap();
    let n = sys.matrix.n_rows();
    let mut bicg_errs = Vec::new();
    for eps in [1e-8, 1e-12, 1e-15] {
        let stop = StoppingCriterion::new(eps, 3000).unwrap();
        let (x, log) = bicgstab(&sys.matrix, &sys.rhs, &m, &stop, &DenseVector::zeros(n)).unwrap();
        if log.converged {
            assert!(
                log.final_residual <= eps,
                "bicgstab eps={eps}: residual {} above threshold",
                log.final_residual
            );
        }
        bicg_errs.push(x_err(&sys.ground_truth, &x).unwrap());

        let (_, glog) = gmres(&sys.matrix, &sys.rhs, &m, &stop, 30).unwrap();
        if glog.converged {
            assert!(
                glog.final_residual <= eps,
                "gmres eps={eps}: residual {} above threshold",
                glog.final_residual
            );
        }
    }
    assert!(
        bicg_errs[2] <= bicg_errs[0],
        "x_err trend violated: eps=1e-15 gives {} vs eps=1e-8 gives {}",
        bicg_errs[2],
        bicg_errs[0]
    );
    println!(
        "ACCEPTANCE 4: PASS - converged runs respect the fresh-residual exit contract; x_err falls from {:.3e} (eps=1e-8) to {:.3e} (eps=1e-15)",
        bicg_errs[0], bicg_errs[2]
    );
}

#[test]
fn criterion_05_preconditioner_strength_ordering() {
    let sys = cube_system(32, AnalyticField::QuadHarmonic);
    let n = sys.matrix.n_rows();
    let stop = StoppingCriterion::new(1e-12, 10_000).unwrap();
    let run = |m: &Preconditioner| {
        let (_, log) = bicgstab(&sys.matrix, &sys.rhs, m, &stop, &DenseVector::zeros(n)).unwrap();
        assert!(log.converged, "{} did not converge", m.name());
        log.iterations
    };
    let it_p1 = run(&build_block_jacobi(&sys.matrix, 1).unwrap());
    let it_p16 = run(&build_block_jacobi(&sys.matrix, 16).unwrap());
    let it_p256 = run(&build_block_jacobi(&sys.matrix, 256).unwrap());
    let it_ilu0 = run(&build_ilu0(&sys.matrix).unwrap());
    let it_jacobi = run(&build_jacobi(&sys.matrix).unwrap());

    assert!(it_p1 <= 2, "exact preconditioner took {it_p1} iterations");
    assert!(it_p16 > 2, "16 blocks took only {it_p16} iterations");
    assert!(
        it_p16 <= 2 * it_p256,
        "iteration growth inverted: p=16 took {it_p16}, p=256 took {it_p256}"
    );
    assert!(
        it_ilu0 < it_jacobi,
        "ILU(0) took {it_ilu0}, point Jacobi {it_jacobi}"
    );
    println!(
        "ACCEPTANCE 5: PASS - 32^3 iterations: p=1 -> {it_p1}, p=16 -> {it_p16}, p=256 -> {it_p256}, ilu0 -> {it_ilu0}, jacobi -> {it_jacobi}"
    );
}

#[test]
fn criterion_06_fem_exactness() {
    let mesh = generate_jittered_tet_mesh(8, 0.25, 42).unwrap();
    let raw = assemble_cotangent_matrix(&mesh).unwrap();
    assert_eq!(raw, raw.transpose(), "unscaled operator not symmetric");
    let field = AnalyticField::Linear {
        a: 1.0,
        b: 2.0,
        c: -1.0,
        d: 0.5,
    };
    let sys = assemble_fem_laplacian(&mesh, &field, false).unwrap();
    for i in 0..sys.matrix.n_rows() {
        if !mesh.is_boundary(i) {
            let (cols, vals) = sys.matrix.row(i);
            let mut off = 0.0;
            let mut diag = 0.0;
            for (c, v) in cols.iter().zip(vals) {
                if *c == i {
                    diag = *v;
                } else {
                    off += v;
                }
            }
            assert_eq!(off + diag, 0.0, "interior row {i} does not sum to zero");
        }
    }
    let ord = minimum_degree_order(&sys.matrix).unwrap();
    let symb = symbolic_factorize(&sys.matrix, &ord).unwrap();
    let f = numeric_factorize(&sys.matrix, &symb).unwrap();
    let x = lu_solve(&f, &sys.rhs, &mut FlopCounter::new()).unwrap();
    let err = x_err(&sys.ground_truth, &x).unwrap();
    assert!(err <= 1e-10, "FEM linear-field x_err {err}");
    println!("ACCEPTANCE 6: PASS - k=8 jittered mesh: symmetric operator, zero interior row sums, linear field solved with x_err {err:.3e}");
}

#[test]
fn criterion_07_multi_rhs_behavior() {
    let sys = cube_system(20, AnalyticField::QuadHarmonic);
    let family = make_rhs_family(&sys, 64).unwrap();

    // Block solve is bitwise the per-column solve.
    let ord = minimum_degree_order(&sys.matrix).unwrap();
    let symb = symbolic_factorize(&sys.matrix, &ord).unwrap();
    let f = numeric_factorize(&sys.matrix, &symb).unwrap();
    let block = lu_solve_block(&f, &family.rhs, &mut FlopCounter::new()).unwrap();
    for k in [0usize, 13, 63] {
        let per = lu_solve(&f, &family.rhs.col_vector(k), &mut FlopCounter::new()).unwrap();
        assert_eq!(block.col(k), per.as_slice(), "column {k} differs");
    }

    // One factorization amortized over 64 solves beats 64 full runs.
    let shared_start = Instant::now();
    let ord = minimum_degree_order(&sys.matrix).unwrap();
    let symb = symbolic_factorize(&sys.matrix, &ord).unwrap();
    let f = numeric_factorize(&sys.matrix, &symb).unwrap();
    let _ = lu_solve_block(&f, &family.rhs, &mut FlopCounter::new()).unwrap();
    let shared = shared_start.elapsed().as_secs_f64();

    let separate_start = Instant::now();
    for k in 0..64 {
        let ord = minimum_degree_order(&sys.matrix).unwrap();
        let symb = symbolic_factorize(&sys.matrix, &ord).unwrap();
        let f = numeric_factorize(&sys.matrix, &symb).unwrap();
        let _ = lu_solve(&f, &family.rhs.col_vector(k), &mut FlopCounter::new()).unwrap();
    }
    let separate = separate_start.elapsed().as_secs_f64();
    assert!(
        shared < 0.25 * separate,
        "shared factorization took {shared:.3}s vs {separate:.3}s for 64 separate runs"
    );

    // The crossover command measures a finite positive t0.
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_sparsebench"))
        .args([
            "crossover",
            "--cube",
            "12",
            "--eps",
            "1e-10",
            "--precond",
            "jacobi",
            "--rhs-max",
            "8",
            "--format",
            "json",
        ])
        .output()
        .expect("crossover runs");
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let t_fact = v["t_fact"].as_f64().unwrap();
    let t_pc = v["t_pc"].as_f64().unwrap();
    let t_slu = v["t_slu_solve"].as_f64().unwrap();
    let t_is = v["t_is_solve"].as_f64().unwrap();
    assert!(t_fact > t_pc, "t_fact {t_fact} vs t_pc {t_pc}");
    assert!(t_is > t_slu, "t_is_solve {t_is} vs t_slu_solve {t_slu}");
    let t0 = v["t0"].as_f64().expect("finite t0");
    assert!(t0 > 0.0, "t0 = {t0}");
    println!(
        "ACCEPTANCE 7: PASS - block solve bitwise-identical; shared factorization {shared:.3}s < 0.25 x {separate:.3}s; crossover t0 = {t0:.2}"
    );
}

#[test]
fn criterion_08_crossover_identities() {
    let cases = [
        CrossoverInput::new(100.0, 0.5, 0.0, 1.5).unwrap(),
        CrossoverInput::new(2.75, 0.003, 0.031, 0.0625).unwrap(),
        CrossoverInput::new(7.5, 0.25, 1.25, 0.625).unwrap(),
    ];
    for c in cases {
        if let CrossoverEstimate::Finite(t0) = empirical_t0(&c) {
            let direct = c.t_fact + t0 * c.t_slu_solve;
            let iterative = c.t_pc + t0 * c.t_is_solve;
            let scale = direct.abs().max(iterative.abs());
            assert!(
                (direct - iterative).abs() <= 1e-12 * scale,
                "balance violated at t0={t0}: {direct} vs {iterative}"
            );
        }
    }
    let c = CostModelInput::new(12_345, 7 * 12_345, 8, 0.0).unwrap();
    assert_eq!(analytic_t0(&c).unwrap(), 1.0);
    println!("ACCEPTANCE 8: PASS - empirical t0 satisfies its balance within 1e-12; analytic t0(m=7n, k_max=8) = 1 exactly");
}

#[test]
fn criterion_09_fill_in_ordering() {
    let sys = cube_system(12, AnalyticField::QuadHarmonic);
    let nat = symbolic_factorize(&sys.matrix, &natural_order(&sys.matrix).unwrap()).unwrap();
    let nat_fill = numeric_factorize(&sys.matrix, &nat).unwrap().stats.fill_nnz;
    let md = symbolic_factorize(&sys.matrix, &minimum_degree_order(&sys.matrix).unwrap()).unwrap();
    let md_fill = numeric_factorize(&sys.matrix, &md).unwrap().stats.fill_nnz;
    let nnz = sys.matrix.nnz() as u64;
    assert!(
        md_fill < nat_fill,
        "minimum degree fill {md_fill} not below natural fill {nat_fill}"
    );
    assert!(md_fill > nnz && nat_fill > nnz);
    println!(
        "ACCEPTANCE 9: PASS - 12^3 fill: natural {nat_fill}, minimum degree {md_fill}, input nnz {nnz}"
    );
}

#[test]
fn criterion_10_memory_relation() {
    let sys = cube_system(16, AnalyticField::QuadHarmonic);
    let ord = minimum_degree_order(&sys.matrix).unwrap();
    let symb = symbolic_factorize(&sys.matrix, &ord).unwrap();
    let f = numeric_factorize(&sys.matrix, &symb).unwrap();
    let lu_bytes = memory_estimate(&f);
    let ilu = build_ilu0(&sys.matrix).unwrap();
    let vectors = 8 * memory_estimate(&sys.rhs);
    let working_set = memory_estimate(&sys.matrix) + memory_estimate(&ilu) + vectors;
    assert!(
        lu_bytes >= 3 * working_set,
        "LU bytes {lu_bytes} not >= 3 x iterative working set {working_set}"
    );
    println!(
        "ACCEPTANCE 10: PASS - LU factors need {lu_bytes} B, {:.1}x the iterative working set ({working_set} B)",
        lu_bytes as f64 / working_set as f64
    );
}

#[test]
fn criterion_11_advisor_determinism() {
    // Memory-bound: iterative.
    let mut memory_bound = Requirements::new(1e-6, 1e6, 1);
    memory_bound.n = 1_000_000;
    memory_bound.nnz = 10_000_000;
    // Round-off accuracy: direct.
    let accuracy = Requirements::new(1e-15, 1e12, 1);
    // Many right-hand sides past a measured crossover: direct.
    let mut many_rhs = Requirements::new(1e-8, 1e12, 500);
    many_rhs.measured = Some(CrossoverInput::new(100.0, 0.5, 0.0, 1.5).unwrap());

    let expect = [
        (&memory_bound, Choice::Iterative, "rule 1"),
        (&accuracy, Choice::Direct, "rule 2"),
        (&many_rhs, Choice::Direct, "rule 3"),
    ];
    for (req, choice, rule) in expect {
        let a = recommend(req).unwrap();
        let b = recommend(req).unwrap();
        assert_eq!(a.to_json(), b.to_json(), "recommendation not reproducible");
        assert_eq!(a.choice, choice);
        assert!(
            a.rules_fired.iter().any(|r| r.starts_with(rule)),
            "{rule} missing from {:?}",
            a.rules_fired
        );
    }
    println!("ACCEPTANCE 11: PASS - the three documented rule firings reproduce byte-identically");
}
