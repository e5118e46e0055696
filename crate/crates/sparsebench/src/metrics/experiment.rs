//! Experiment plans and their sequential executor.

use super::report::SolveReport;
use super::{memory_estimate, x_err};
use crate::direct::{lu_solve_block, numeric_factorize, symbolic_factorize, OrderingMethod};
use crate::flops::FlopCounter;
use crate::iterative::{
    bicgstab, build_block_jacobi, build_ilu0, build_jacobi, gmres, Preconditioner,
    StoppingCriterion,
};
use crate::problem::{
    assemble_fd_laplacian, assemble_fem_laplacian, generate_jittered_tet_mesh, make_rhs_family,
    read_mesh, AnalyticField, AssembledSystem, RegularGrid3,
};
use crate::sparse::{axpy, norm2, spmv, DenseBlock, DenseVector};
use std::path::PathBuf;
use std::time::Instant;

/// Where the coefficient matrix comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    /// Finite difference Laplacian on an `n^3` grid over the unit cube.
    Cube { n: usize },
    /// FEM Laplacian on a jittered lattice mesh.
    Jittered { k: usize, jitter: f64, seed: u64 },
    /// FEM Laplacian on a mesh file.
    MeshFile { path: PathBuf },
}

impl ProblemSpec {
    pub fn label(&self) -> String {
        match self {
            ProblemSpec::Cube { n } => format!("cube{n}"),
            ProblemSpec::Jittered { k, .. } => format!("jitter{k}"),
            ProblemSpec::MeshFile { path } => format!("mesh:{}", path.display()),
        }
    }

    pub fn build(&self, field: &AnalyticField) -> Result<AssembledSystem, String> {
        match self {
            ProblemSpec::Cube { n } => {
                let grid = RegularGrid3::cube(*n).map_err(|e| e.to_string())?;
                assemble_fd_laplacian(&grid, field).map_err(|e| e.to_string())
            }
            ProblemSpec::Jittered { k, jitter, seed } => {
                let mesh =
                    generate_jittered_tet_mesh(*k, *jitter, *seed).map_err(|e| e.to_string())?;
                assemble_fem_laplacian(&mesh, field, false).map_err(|e| e.to_string())
            }
            ProblemSpec::MeshFile { path } => {
                let mesh = read_mesh(path).map_err(|e| e.to_string())?;
                assemble_fem_laplacian(&mesh, field, false).map_err(|e| e.to_string())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrecondSpec {
    None,
    Jacobi,
    BlockJacobi { blocks: usize },
    Ilu0,
}

impl PrecondSpec {
    pub fn build(&self, a: &crate::sparse::CsrMatrix) -> Result<Preconditioner, String> {
        match self {
            PrecondSpec::None => Ok(Preconditioner::Identity),
            PrecondSpec::Jacobi => build_jacobi(a).map_err(|e| e.to_string()),
            PrecondSpec::BlockJacobi { blocks } => {
                build_block_jacobi(a, *blocks).map_err(|e| e.to_string())
            }
            PrecondSpec::Ilu0 => build_ilu0(a).map_err(|e| e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverSpec {
    Direct {
        ordering: OrderingMethod,
    },
    Bicgstab {
        precond: PrecondSpec,
    },
    Gmres {
        precond: PrecondSpec,
        restart: usize,
    },
}

impl SolverSpec {
    pub fn label(&self) -> String {
        match self {
            SolverSpec::Direct { ordering } => format!("direct-{}", ordering.name()),
            SolverSpec::Bicgstab { .. } => "bicgstab".into(),
            SolverSpec::Gmres { restart, .. } => format!("gmres{restart}"),
        }
    }
}

/// One cell of an experiment matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentCell {
    pub problem: ProblemSpec,
    pub field: AnalyticField,
    pub solver: SolverSpec,
    pub epsilon: f64,
    pub max_iter: usize,
    pub t_rhs: usize,
    pub repetitions: usize,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentPlan {
    pub cells: Vec<ExperimentCell>,
}

/// Executes every cell sequentially (timing regions never overlap).
/// Repetitions rerun the whole cell and the run with the smallest total
/// time is reported; solver outputs are deterministic, so repetitions only
/// differ in the timing columns. A failing cell yields a report carrying
/// the error tag and the run continues.
pub fn run_experiments(plan: &ExperimentPlan) -> Vec<SolveReport> {
    let resolution = timer_resolution();
    let mut reports = Vec::with_capacity(plan.cells.len());
    for cell in &plan.cells {
        let reps = cell.repetitions.max(1);
        let mut best: Option<SolveReport> = None;
        for _ in 0..reps {
            let report = match run_cell(cell) {
                Ok(r) => r,
                Err(message) => {
                    let mut r = SolveReport::empty(&cell.problem.label(), &cell.solver.label());
                    r.epsilon = Some(cell.epsilon);
                    r.t_rhs = cell.t_rhs as u64;
                    r.error = Some(message);
                    r
                }
            };
            best = match best {
                Some(b) if b.total_s <= report.total_s => Some(b),
                _ => Some(report),
            };
        }
        let mut report = best.expect("at least one repetition");
        report.timer_resolution_s = Some(resolution);
        reports.push(report);
    }
    reports
}

fn run_cell(cell: &ExperimentCell) -> Result<SolveReport, String> {
    let sys = cell.problem.build(&cell.field)?;
    let n = sys.matrix.n_rows();
    let (rhs_block, gt_block) = if cell.t_rhs <= 1 {
        (
            DenseBlock::from_columns(std::slice::from_ref(&sys.rhs)).map_err(|e| e.to_string())?,
            DenseBlock::from_columns(std::slice::from_ref(&sys.ground_truth))
                .map_err(|e| e.to_string())?,
        )
    } else {
        let fam = make_rhs_family(&sys, cell.t_rhs).map_err(|e| e.to_string())?;
        (fam.rhs, fam.ground_truth)
    };
    let t = rhs_block.n_cols();

    let mut report = match cell.solver {
        SolverSpec::Direct { ordering } => {
            let total = Instant::now();
            let t0 = Instant::now();
            let ord = ordering.order(&sys.matrix).map_err(|e| e.to_string())?;
            let order_s = t0.elapsed().as_secs_f64();
            let t0 = Instant::now();
            let sym = symbolic_factorize(&sys.matrix, &ord).map_err(|e| e.to_string())?;
            let symbolic_s = t0.elapsed().as_secs_f64();
            let t0 = Instant::now();
            let factors = numeric_factorize(&sys.matrix, &sym).map_err(|e| e.to_string())?;
            let factor_s = t0.elapsed().as_secs_f64();
            // All right-hand sides share the one factorization.
            let mut flops = FlopCounter::new();
            let t0 = Instant::now();
            let x = lu_solve_block(&factors, &rhs_block, &mut flops).map_err(|e| e.to_string())?;
            let solve_s = t0.elapsed().as_secs_f64();

            let mut report = SolveReport::empty(&cell.problem.label(), &cell.solver.label());
            report.order_s = Some(order_s);
            report.symbolic_s = Some(symbolic_s);
            report.factor_s = Some(factor_s);
            report.solve_s = Some(solve_s);
            report.flops = factors.stats.factor_flops + flops.total();
            report.fill_density = Some(factors.stats.fill_density_percent);
            report.total_s = total.elapsed().as_secs_f64();
            report.t_rhs = t as u64;
            report.converged = true;
            report.mem_bytes = memory_estimate(&sys.matrix)
                + memory_estimate(&factors)
                + 2 * memory_estimate(&rhs_block);
            fill_accuracy(&mut report, &sys, &x, &gt_block, &rhs_block)?;
            report
        }
        SolverSpec::Bicgstab { precond } | SolverSpec::Gmres { precond, .. } => {
            let stop =
                StoppingCriterion::new(cell.epsilon, cell.max_iter).map_err(|e| e.to_string())?;
            let total = Instant::now();
            let pc_start = Instant::now();
            let m = precond.build(&sys.matrix)?;
            let precond_s = pc_start.elapsed().as_secs_f64();

            let mut x = DenseBlock::zeros(n, t);
            let mut iterations = 0u64;
            let mut solve_s = 0.0;
            let mut flops = 0u64;
            let mut all_converged = true;
            for k in 0..t {
                let b = rhs_block.col_vector(k);
                let (xk, log) = match cell.solver {
                    SolverSpec::Bicgstab { .. } => {
                        bicgstab(&sys.matrix, &b, &m, &stop, &DenseVector::zeros(n))
                            .map_err(|e| e.to_string())?
                    }
                    SolverSpec::Gmres { restart, .. } => {
                        gmres(&sys.matrix, &b, &m, &stop, restart).map_err(|e| e.to_string())?
                    }
                    SolverSpec::Direct { .. } => unreachable!(),
                };
                x.set_col(k, &xk);
                iterations += log.iterations as u64;
                solve_s += log.solve_seconds;
                flops += log.solve_flops;
                all_converged &= log.converged;
            }
            let workspace_vectors = match cell.solver {
                SolverSpec::Bicgstab { .. } => 8,
                SolverSpec::Gmres { restart, .. } => restart as u64 + 4,
                SolverSpec::Direct { .. } => unreachable!(),
            };
            let mem_bytes = memory_estimate(&sys.matrix)
                + memory_estimate(&m)
                + workspace_vectors * 8 * n as u64;
            let mut report = SolveReport::empty(&cell.problem.label(), &cell.solver.label());
            report.precond = Some(m.name().to_string());
            report.blocks = m.block_count().map(|b| b as u64);
            report.epsilon = Some(cell.epsilon);
            report.n = n as u64;
            report.nnz = sys.matrix.nnz() as u64;
            report.t_rhs = t as u64;
            report.precond_s = Some(precond_s);
            report.solve_s = Some(solve_s);
            report.total_s = total.elapsed().as_secs_f64();
            report.flops = flops;
            report.iterations = Some(iterations);
            report.mem_bytes = mem_bytes;
            report.converged = all_converged;
            fill_accuracy(&mut report, &sys, &x, &gt_block, &rhs_block)?;
            report
        }
    };
    report.problem = cell.problem.label();
    Ok(report)
}

/// Fills `x_err` and the freshly recomputed residual (worst column for
/// multiple right-hand sides).
fn fill_accuracy(
    report: &mut SolveReport,
    sys: &AssembledSystem,
    x: &DenseBlock,
    gt: &DenseBlock,
    rhs: &DenseBlock,
) -> Result<(), String> {
    let mut worst_err: f64 = 0.0;
    let mut worst_res: f64 = 0.0;
    let mut flops = FlopCounter::new();
    for k in 0..x.n_cols() {
        let xk = x.col_vector(k);
        let gk = gt.col_vector(k);
        let e = x_err(&gk, &xk).map_err(|e| e.to_string())?;
        worst_err = worst_err.max(e);
        let b = rhs.col_vector(k);
        let ax = spmv(&sys.matrix, &xk, &mut flops).map_err(|e| e.to_string())?;
        let r = axpy(-1.0, &ax, &b, &mut flops).map_err(|e| e.to_string())?;
        let nb = norm2(&b, &mut flops);
        let res = if nb > 0.0 {
            norm2(&r, &mut flops) / nb
        } else {
            norm2(&r, &mut flops)
        };
        worst_res = worst_res.max(res);
    }
    report.x_err = Some(worst_err);
    report.residual = Some(worst_res);
    report.n = sys.matrix.n_rows() as u64;
    report.nnz = sys.matrix.nnz() as u64;
    Ok(())
}

/// Smallest positive interval the monotonic clock resolves, in seconds.
fn timer_resolution() -> f64 {
    let mut best = f64::INFINITY;
    for _ in 0..16 {
        let t0 = Instant::now();
        let mut d = t0.elapsed();
        while d.as_nanos() == 0 {
            d = t0.elapsed();
        }
        best = best.min(d.as_secs_f64());
    }
    best
}
