//! Accuracy, efficiency, and memory metrics.

mod experiment;
mod report;

pub use experiment::{
    run_experiments, ExperimentCell, ExperimentPlan, PrecondSpec, ProblemSpec, SolverSpec,
};
pub use report::{emit_report, parse_csv_reports, read_json_reports, ReportFormat, SolveReport};

use crate::direct::LuFactors;
use crate::iterative::Preconditioner;
use crate::sparse::{CsrMatrix, DenseBlock, DenseVector};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("ground truth has zero norm")]
    ZeroGroundTruth,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("baseline unit count {0} missing from measurements")]
    MissingBaseline(u64),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("report parse error at line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Relative approximation error
/// `||ground_truth - computed||_2 / ||ground_truth||_2`.
pub fn x_err(ground_truth: &DenseVector, computed: &DenseVector) -> Result<f64, MetricsError> {
    if ground_truth.len() != computed.len() {
        return Err(MetricsError::LengthMismatch(
            ground_truth.len(),
            computed.len(),
        ));
    }
    let mut diff = 0.0;
    let mut norm = 0.0;
    for (g, c) in ground_truth.iter().zip(computed.iter()) {
        diff += (g - c) * (g - c);
        norm += g * g;
    }
    if norm == 0.0 {
        return Err(MetricsError::ZeroGroundTruth);
    }
    Ok(diff.sqrt() / norm.sqrt())
}

/// Parallel efficiency from wall times keyed by unit count:
/// `efficiency(n) = [T(base) / T(n)] / (n / base) * 100`.
///
/// The baseline is explicit because measurements do not always include a
/// single-unit run.
pub fn efficiency(
    times: &BTreeMap<u64, f64>,
    base: u64,
) -> Result<BTreeMap<u64, f64>, MetricsError> {
    let t_base = *times
        .get(&base)
        .ok_or(MetricsError::MissingBaseline(base))?;
    Ok(times
        .iter()
        .map(|(&n, &t)| (n, (t_base / t) * (base as f64 / n as f64) * 100.0))
        .collect())
}

/// Flop-rate efficiency: `[F(n) / F(base)] / (n / base) * 100`.
pub fn flops_efficiency(
    rates: &BTreeMap<u64, f64>,
    base: u64,
) -> Result<BTreeMap<u64, f64>, MetricsError> {
    let f_base = *rates
        .get(&base)
        .ok_or(MetricsError::MissingBaseline(base))?;
    Ok(rates
        .iter()
        .map(|(&n, &f)| (n, (f / f_base) * (base as f64 / n as f64) * 100.0))
        .collect())
}

/// Byte-count estimate for the containers a solver keeps in memory.
///
/// The estimate covers index and value storage only (16 bytes per CSR entry,
/// 8 per row pointer, 8 per dense value) and is additive over composed
/// objects.
pub trait MemoryFootprint {
    fn memory_bytes(&self) -> u64;
}

pub fn memory_estimate<T: MemoryFootprint + ?Sized>(object: &T) -> u64 {
    object.memory_bytes()
}

impl MemoryFootprint for CsrMatrix {
    fn memory_bytes(&self) -> u64 {
        16 * self.nnz() as u64 + 8 * (self.n_rows() as u64 + 1)
    }
}

impl MemoryFootprint for DenseVector {
    fn memory_bytes(&self) -> u64 {
        8 * self.len() as u64
    }
}

impl MemoryFootprint for DenseBlock {
    fn memory_bytes(&self) -> u64 {
        8 * self.n_rows() as u64 * self.n_cols() as u64
    }
}

impl MemoryFootprint for LuFactors {
    fn memory_bytes(&self) -> u64 {
        self.l().memory_bytes() + self.u().memory_bytes() + 16 * self.n() as u64
    }
}

impl MemoryFootprint for Preconditioner {
    fn memory_bytes(&self) -> u64 {
        match self {
            Preconditioner::Identity => 0,
            Preconditioner::Jacobi { inv_diag } => 8 * inv_diag.len() as u64,
            Preconditioner::BlockJacobi { blocks, .. } => {
                blocks.iter().map(|(_, f)| f.memory_bytes()).sum()
            }
            Preconditioner::Ilu0 { factors } => factors.memory_bytes(),
        }
    }
}
