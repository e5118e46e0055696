//! Command-line front end: `gen`, `solve`, `bench`, `crossover`, `advise`.
//!
//! The binary is a thin dispatcher over the library; every command maps to
//! library calls plus argument parsing. Plan files for `bench` are
//! line-oriented: one experiment cell per line using the same flags as
//! `solve` plus `--reps`, with `#` or `%` starting a comment line.

use crate::advisor::{recommend, CrossoverEstimate, CrossoverInput, Requirements};
use crate::direct::{numeric_factorize, symbolic_factorize, OrderingMethod};
use crate::flops::FlopCounter;
use crate::iterative::{bicgstab, gmres, StoppingCriterion};
use crate::metrics::{
    emit_report, run_experiments, ExperimentCell, ExperimentPlan, PrecondSpec, ProblemSpec,
    ReportFormat, SolveReport, SolverSpec,
};
use crate::problem::{
    assemble_fd_laplacian, assemble_fem_laplacian, generate_jittered_tet_mesh, make_rhs_family,
    read_mesh, write_mesh, AnalyticField, AssembledSystem, RegularGrid3,
};
use crate::sparse::io::write_matrix;
use crate::sparse::DenseVector;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser, Debug)]
#[command(
    name = "sparsebench",
    about = "Sparse Laplace systems: generation, direct and iterative solvers, benchmarks, and solver advice"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a system (grid or mesh) and write matrix and mesh files
    Gen(GenArgs),
    /// Run one solve and print its report
    Solve(SolveArgs),
    /// Run an experiment plan file and write the report table
    Bench(BenchArgs),
    /// Measure factor/solve and precondition/solve phases over a family of
    /// right-hand sides and report the crossover t0
    Crossover(CrossoverArgs),
    /// Print a solver recommendation for the given requirements
    Advise(AdviseArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ProblemArgs {
    /// Cubic grid with N nodes per axis (finite difference Laplacian)
    #[arg(long, conflicts_with_all = ["mesh", "k"])]
    pub cube: Option<usize>,
    /// Tetrahedral mesh file (FEM cotangent Laplacian)
    #[arg(long, conflicts_with_all = ["cube", "k"])]
    pub mesh: Option<PathBuf>,
    /// Jittered lattice mesh with K cells per axis (FEM cotangent Laplacian)
    #[arg(long, conflicts_with_all = ["cube", "mesh"])]
    pub k: Option<usize>,
    /// Jitter magnitude as a fraction of the lattice spacing
    #[arg(long, default_value_t = 0.25)]
    pub jitter: f64,
    /// Seed for jittered mesh generation
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Dirichlet boundary field: linear | quad | trig
    #[arg(long, default_value = "quad")]
    pub field: String,
}

impl ProblemArgs {
    fn field(&self) -> Result<AnalyticField, String> {
        match self.field.as_str() {
            "linear" => Ok(AnalyticField::Linear {
                a: 1.0,
                b: 2.0,
                c: -1.0,
                d: 0.5,
            }),
            "quad" => Ok(AnalyticField::QuadHarmonic),
            "trig" => Ok(AnalyticField::TrigHarmonic),
            other => Err(format!("unknown field `{other}` (linear|quad|trig)")),
        }
    }

    fn spec(&self) -> Result<ProblemSpec, String> {
        match (self.cube, &self.mesh, self.k) {
            (Some(n), None, None) => Ok(ProblemSpec::Cube { n }),
            (None, Some(path), None) => Ok(ProblemSpec::MeshFile { path: path.clone() }),
            (None, None, Some(k)) => Ok(ProblemSpec::Jittered {
                k,
                jitter: self.jitter,
                seed: self.seed,
            }),
            _ => Err("exactly one of --cube, --mesh, --k must be given".into()),
        }
    }

    fn build(&self) -> Result<(ProblemSpec, AssembledSystem), String> {
        let spec = self.spec()?;
        let sys = spec.build(&self.field()?)?;
        Ok((spec, sys))
    }
}

#[derive(Args, Debug, Clone)]
pub struct GenArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Matrix output path
    #[arg(long, default_value = "matrix.txt")]
    pub out: PathBuf,
    /// Mesh output path (mesh-based problems only)
    #[arg(long)]
    pub mesh_out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Solver: direct | bicgstab | gmres
    #[arg(long, default_value = "bicgstab")]
    pub method: String,
    /// Elimination ordering for direct solves: natural | mindeg
    #[arg(long, default_value = "mindeg")]
    pub ordering: String,
    /// Preconditioner: none | jacobi | bjacobi | ilu0
    #[arg(long, default_value = "jacobi")]
    pub precond: String,
    /// Block count for --precond bjacobi
    #[arg(long, default_value_t = 4)]
    pub blocks: usize,
    /// Relative residual threshold, in (0, 1)
    #[arg(long, default_value_t = 1e-12)]
    pub eps: f64,
    /// Iteration cap
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    /// GMRES restart length
    #[arg(long, default_value_t = 30)]
    pub restart: usize,
    /// Number of right-hand sides (t > 1 uses the rotating boundary family)
    #[arg(long, default_value_t = 1)]
    pub rhs: usize,
    /// Report format: csv | json
    #[arg(long, default_value = "json")]
    pub format: String,
    /// Report output path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl SolveArgs {
    fn solver_spec(&self) -> Result<SolverSpec, String> {
        let precond = match self.precond.as_str() {
            "none" => PrecondSpec::None,
            "jacobi" => PrecondSpec::Jacobi,
            "bjacobi" => PrecondSpec::BlockJacobi {
                blocks: self.blocks,
            },
            "ilu0" => PrecondSpec::Ilu0,
            other => return Err(format!("unknown preconditioner `{other}`")),
        };
        match self.method.as_str() {
            "direct" => Ok(SolverSpec::Direct {
                ordering: self.ordering_method()?,
            }),
            "bicgstab" => Ok(SolverSpec::Bicgstab { precond }),
            "gmres" => Ok(SolverSpec::Gmres {
                precond,
                restart: self.restart,
            }),
            other => Err(format!("unknown method `{other}`")),
        }
    }

    fn ordering_method(&self) -> Result<OrderingMethod, String> {
        match self.ordering.as_str() {
            "natural" => Ok(OrderingMethod::Natural),
            "mindeg" => Ok(OrderingMethod::MinimumDegree),
            other => Err(format!("unknown ordering `{other}`")),
        }
    }

    fn cell(&self, repetitions: usize) -> Result<ExperimentCell, String> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(format!("--eps must lie in (0, 1), got {}", self.eps));
        }
        if self.rhs == 0 {
            return Err("--rhs must be at least 1".into());
        }
        Ok(ExperimentCell {
            problem: self.problem.spec()?,
            field: self.problem.field()?,
            solver: self.solver_spec()?,
            epsilon: self.eps,
            max_iter: self.max_iter,
            t_rhs: self.rhs,
            repetitions,
        })
    }

    fn report_format(&self) -> Result<ReportFormat, String> {
        self.format.parse()
    }
}

#[derive(Args, Debug, Clone)]
pub struct BenchArgs {
    /// Plan file: one cell per line, `solve` flags plus --reps
    #[arg(long)]
    pub plan: PathBuf,
    /// Report format: csv | json
    #[arg(long, default_value = "csv")]
    pub format: String,
    /// Output path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct CrossoverArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Iterative method to compare: bicgstab | gmres
    #[arg(long, default_value = "bicgstab")]
    pub method: String,
    /// Preconditioner for the iterative side
    #[arg(long, default_value = "jacobi")]
    pub precond: String,
    #[arg(long, default_value_t = 4)]
    pub blocks: usize,
    /// Elimination ordering for the direct side
    #[arg(long, default_value = "mindeg")]
    pub ordering: String,
    #[arg(long, default_value_t = 1e-10)]
    pub eps: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 30)]
    pub restart: usize,
    /// Size of the right-hand-side family to measure with
    #[arg(long, default_value_t = 16)]
    pub rhs_max: usize,
    /// Output format: json | csv (csv holds the per-t table)
    #[arg(long, default_value = "json")]
    pub format: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct AdviseArgs {
    /// Target relative solution accuracy
    #[arg(long)]
    pub accuracy: f64,
    /// Memory budget in bytes
    #[arg(long)]
    pub mem: f64,
    /// Number of right-hand sides
    #[arg(long)]
    pub rhs: u64,
    /// Unknown count (0 = unknown)
    #[arg(long, default_value_t = 0)]
    pub n: u64,
    /// Nonzero count (0 = unknown)
    #[arg(long, default_value_t = 0)]
    pub nnz: u64,
    /// The discretization is irregular (mesh rather than grid)
    #[arg(long)]
    pub irregular: bool,
    /// Worst-case iteration count for the analytic crossover
    #[arg(long)]
    pub kmax: Option<u64>,
    /// LU fill growth factor for the memory rule
    #[arg(long, default_value_t = crate::advisor::DEFAULT_LU_FILL_FACTOR)]
    pub fill_factor: f64,
    /// Measured factorization time (seconds); give all four --t-* flags
    #[arg(long)]
    pub t_fact: Option<f64>,
    /// Measured direct solve time per rhs (seconds)
    #[arg(long)]
    pub t_slu_solve: Option<f64>,
    /// Measured preconditioner setup time (seconds)
    #[arg(long)]
    pub t_pc: Option<f64>,
    /// Measured iterative solve time per rhs (seconds)
    #[arg(long)]
    pub t_is_solve: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Plan-file cell: `solve` flags plus a repetition count.
#[derive(Parser, Debug)]
#[command(name = "cell", no_binary_name = true)]
struct PlanCellArgs {
    #[command(flatten)]
    solve: SolveArgs,
    #[arg(long, default_value_t = 1)]
    reps: usize,
}

pub fn run() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Version/help requests are not errors.
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            eprintln!("{}", msg.lines().next().unwrap_or("invalid usage"));
            return ExitCode::from(2);
        }
    };
    let outcome = match cli.command {
        Command::Gen(args) => cmd_gen(&args),
        Command::Solve(args) => cmd_solve(&args),
        Command::Bench(args) => cmd_bench(&args),
        Command::Crossover(args) => cmd_crossover(&args),
        Command::Advise(args) => cmd_advise(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

fn cmd_gen(args: &GenArgs) -> Result<ExitCode, String> {
    let field = args.problem.field()?;
    match args.problem.spec()? {
        ProblemSpec::Cube { n } => {
            let grid = RegularGrid3::cube(n).map_err(|e| e.to_string())?;
            let sys = assemble_fd_laplacian(&grid, &field).map_err(|e| e.to_string())?;
            write_matrix(&sys.matrix, &args.out).map_err(|e| e.to_string())?;
            println!(
                "cube{n}: n={} nnz={} -> {}",
                sys.matrix.n_rows(),
                sys.matrix.nnz(),
                args.out.display()
            );
        }
        ProblemSpec::Jittered { k, jitter, seed } => {
            let mesh = generate_jittered_tet_mesh(k, jitter, seed).map_err(|e| e.to_string())?;
            let sys = assemble_fem_laplacian(&mesh, &field, false).map_err(|e| e.to_string())?;
            write_matrix(&sys.matrix, &args.out).map_err(|e| e.to_string())?;
            if let Some(mesh_out) = &args.mesh_out {
                write_mesh(&mesh, mesh_out).map_err(|e| e.to_string())?;
                println!(
                    "jitter{k}: n={} nnz={} tets={} -> {} + {}",
                    sys.matrix.n_rows(),
                    sys.matrix.nnz(),
                    mesh.n_tets(),
                    args.out.display(),
                    mesh_out.display()
                );
            } else {
                println!(
                    "jitter{k}: n={} nnz={} tets={} -> {}",
                    sys.matrix.n_rows(),
                    sys.matrix.nnz(),
                    mesh.n_tets(),
                    args.out.display()
                );
            }
        }
        ProblemSpec::MeshFile { path } => {
            let mesh = read_mesh(&path).map_err(|e| e.to_string())?;
            let sys = assemble_fem_laplacian(&mesh, &field, false).map_err(|e| e.to_string())?;
            write_matrix(&sys.matrix, &args.out).map_err(|e| e.to_string())?;
            if let Some(mesh_out) = &args.mesh_out {
                write_mesh(&mesh, mesh_out).map_err(|e| e.to_string())?;
            }
            println!(
                "mesh {}: n={} nnz={} -> {}",
                path.display(),
                sys.matrix.n_rows(),
                sys.matrix.nnz(),
                args.out.display()
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn emit_single(
    report: &SolveReport,
    format: ReportFormat,
    out: &Option<PathBuf>,
) -> Result<(), String> {
    match out {
        Some(path) => {
            emit_report(std::slice::from_ref(report), format, path).map_err(|e| e.to_string())?
        }
        None => match format {
            ReportFormat::Csv => print!("{}", SolveReport::to_csv(std::slice::from_ref(report))),
            ReportFormat::Json => {
                println!(
                    "{}",
                    serde_json::to_string_pretty(report).map_err(|e| e.to_string())?
                );
            }
        },
    }
    Ok(())
}

fn cmd_solve(args: &SolveArgs) -> Result<ExitCode, String> {
    let cell = args.cell(1)?;
    let reports = run_experiments(&ExperimentPlan { cells: vec![cell] });
    let report = &reports[0];
    emit_single(report, args.report_format()?, &args.out)?;
    if let Some(err) = &report.error {
        eprintln!("error: {err}");
        return Ok(ExitCode::FAILURE);
    }
    if report.converged {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("error: solver did not converge");
        Ok(ExitCode::FAILURE)
    }
}

fn cmd_bench(args: &BenchArgs) -> Result<ExitCode, String> {
    let text = std::fs::read_to_string(&args.plan)
        .map_err(|e| format!("cannot read plan {}: {e}", args.plan.display()))?;
    let mut cells = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        let parsed = PlanCellArgs::try_parse_from(&tokens)
            .map_err(|e| format!("plan line {}: {}", idx + 1, first_line(&e.to_string())))?;
        if parsed.reps == 0 {
            return Err(format!("plan line {}: --reps must be at least 1", idx + 1));
        }
        cells.push(parsed.solve.cell(parsed.reps)?);
    }
    if cells.is_empty() {
        return Err("plan file contains no cells".into());
    }
    let reports = run_experiments(&ExperimentPlan { cells });
    let format: ReportFormat = args.format.parse()?;
    match &args.out {
        Some(path) => emit_report(&reports, format, path).map_err(|e| e.to_string())?,
        None => match format {
            ReportFormat::Csv => print!("{}", SolveReport::to_csv(&reports)),
            ReportFormat::Json => println!(
                "{}",
                serde_json::to_string_pretty(&reports).map_err(|e| e.to_string())?
            ),
        },
    }
    Ok(ExitCode::SUCCESS)
}

fn first_line(s: &str) -> &str {
    s.lines().next().unwrap_or(s)
}

fn cmd_crossover(args: &CrossoverArgs) -> Result<ExitCode, String> {
    if !(args.eps > 0.0 && args.eps < 1.0) {
        return Err(format!("--eps must lie in (0, 1), got {}", args.eps));
    }
    if args.rhs_max == 0 {
        return Err("--rhs-max must be at least 1".into());
    }
    let (spec, sys) = args.problem.build()?;
    let t = args.rhs_max;
    let family = make_rhs_family(&sys, t).map_err(|e| e.to_string())?;

    // Direct side: one factorization, then the whole family.
    let ordering = match args.ordering.as_str() {
        "natural" => OrderingMethod::Natural,
        "mindeg" => OrderingMethod::MinimumDegree,
        other => return Err(format!("unknown ordering `{other}`")),
    };
    let t0_clock = Instant::now();
    let ord = ordering.order(&sys.matrix).map_err(|e| e.to_string())?;
    let sym = symbolic_factorize(&sys.matrix, &ord).map_err(|e| e.to_string())?;
    let factors = numeric_factorize(&sys.matrix, &sym).map_err(|e| e.to_string())?;
    let t_fact = t0_clock.elapsed().as_secs_f64();

    let mut flops = FlopCounter::new();
    let t0_clock = Instant::now();
    let _ = crate::direct::lu_solve_block(&factors, &family.rhs, &mut flops)
        .map_err(|e| e.to_string())?;
    let t_slu_solve = t0_clock.elapsed().as_secs_f64() / t as f64;

    // Iterative side: one preconditioner, one solve per column.
    let precond = match args.precond.as_str() {
        "none" => PrecondSpec::None,
        "jacobi" => PrecondSpec::Jacobi,
        "bjacobi" => PrecondSpec::BlockJacobi {
            blocks: args.blocks,
        },
        "ilu0" => PrecondSpec::Ilu0,
        other => return Err(format!("unknown preconditioner `{other}`")),
    };
    let t0_clock = Instant::now();
    let m = precond.build(&sys.matrix)?;
    let t_pc = t0_clock.elapsed().as_secs_f64();

    let stop = StoppingCriterion::new(args.eps, args.max_iter).map_err(|e| e.to_string())?;
    let n = sys.matrix.n_rows();
    let mut iter_total = 0.0;
    let mut all_converged = true;
    for k in 0..t {
        let b = family.rhs.col_vector(k);
        let log = match args.method.as_str() {
            "bicgstab" => {
                let (_, log) = bicgstab(&sys.matrix, &b, &m, &stop, &DenseVector::zeros(n))
                    .map_err(|e| e.to_string())?;
                log
            }
            "gmres" => {
                let (_, log) =
                    gmres(&sys.matrix, &b, &m, &stop, args.restart).map_err(|e| e.to_string())?;
                log
            }
            other => return Err(format!("unknown method `{other}`")),
        };
        iter_total += log.solve_seconds;
        all_converged &= log.converged;
    }
    let t_is_solve = iter_total / t as f64;

    let input =
        CrossoverInput::new(t_fact, t_slu_solve, t_pc, t_is_solve).map_err(|e| e.to_string())?;
    let estimate = crate::advisor::empirical_t0(&input);

    let lines: Vec<serde_json::Value> = (1..=t)
        .map(|i| {
            serde_json::json!({
                "t": i,
                "direct_s": t_fact + i as f64 * t_slu_solve,
                "iterative_s": t_pc + i as f64 * t_is_solve,
            })
        })
        .collect();
    let t0_json = match estimate {
        CrossoverEstimate::Finite(v) => serde_json::json!(v),
        CrossoverEstimate::IterativeAlwaysFaster => serde_json::json!("iterative-always-faster"),
        CrossoverEstimate::DirectAlwaysFaster => serde_json::json!("direct-always-faster"),
    };
    let summary = serde_json::json!({
        "problem": spec.label(),
        "n": sys.matrix.n_rows(),
        "nnz": sys.matrix.nnz(),
        "epsilon": args.eps,
        "method": args.method,
        "precond": args.precond,
        "all_converged": all_converged,
        "t_fact": t_fact,
        "t_slu_solve": t_slu_solve,
        "t_pc": t_pc,
        "t_is_solve": t_is_solve,
        "t0": t0_json,
        "lines": lines,
    });

    match args.format.as_str() {
        "json" => {
            let text = serde_json::to_string_pretty(&summary).map_err(|e| e.to_string())?;
            match &args.out {
                Some(path) => std::fs::write(path, text + "\n").map_err(|e| e.to_string())?,
                None => println!("{text}"),
            }
        }
        "csv" => {
            let mut table = format!(
                "% empirical_t0 = {}\nt,direct_s,iterative_s\n",
                match estimate {
                    CrossoverEstimate::Finite(v) => v.to_string(),
                    CrossoverEstimate::IterativeAlwaysFaster =>
                        "iterative-always-faster".to_string(),
                    CrossoverEstimate::DirectAlwaysFaster => "direct-always-faster".to_string(),
                }
            );
            for i in 1..=t {
                table.push_str(&format!(
                    "{},{},{}\n",
                    i,
                    t_fact + i as f64 * t_slu_solve,
                    t_pc + i as f64 * t_is_solve
                ));
            }
            match &args.out {
                Some(path) => std::fs::write(path, table).map_err(|e| e.to_string())?,
                None => print!("{table}"),
            }
        }
        other => return Err(format!("unknown format `{other}`")),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_advise(args: &AdviseArgs) -> Result<ExitCode, String> {
    let measured_flags = [args.t_fact, args.t_slu_solve, args.t_pc, args.t_is_solve];
    let measured = if measured_flags.iter().all(Option::is_some) {
        Some(
            CrossoverInput::new(
                args.t_fact.unwrap(),
                args.t_slu_solve.unwrap(),
                args.t_pc.unwrap(),
                args.t_is_solve.unwrap(),
            )
            .map_err(|e| e.to_string())?,
        )
    } else if measured_flags.iter().any(Option::is_some) {
        return Err("give all of --t-fact, --t-slu-solve, --t-pc, --t-is-solve, or none".into());
    } else {
        None
    };
    let req = Requirements {
        accuracy_target: args.accuracy,
        memory_budget_bytes: args.mem,
        rhs_count: args.rhs,
        regular_grid: !args.irregular,
        n: args.n,
        nnz: args.nnz,
        lu_fill_factor: args.fill_factor,
        measured,
        k_max: args.kmax,
    };
    let rec = recommend(&req).map_err(|e| e.to_string())?;
    let text = rec.to_json();
    match &args.out {
        Some(path) => std::fs::write(path, text + "\n").map_err(|e| e.to_string())?,
        None => println!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}
