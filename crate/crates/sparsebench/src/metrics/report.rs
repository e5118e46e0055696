//! Machine-readable solve reports.
//!
//! The CSV schema is fixed:
//! `problem,solver,precond,blocks,epsilon,n,nnz,t_rhs,order_s,symbolic_s,factor_s,precond_s,solve_s,total_s,flops,iterations,fill_density,mem_bytes,x_err,residual,converged`
//! with missing fields left empty. JSON mirrors the same field names; it
//! additionally carries `error` and `timer_resolution_s` when present.
//! Numeric values are written in round-trip decimal.

use super::MetricsError;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

pub const CSV_HEADER: &str = "problem,solver,precond,blocks,epsilon,n,nnz,t_rhs,order_s,symbolic_s,factor_s,precond_s,solve_s,total_s,flops,iterations,fill_density,mem_bytes,x_err,residual,converged";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

/// One solve, fully described: configuration echo, per-phase timings, flop
/// and iteration counts, memory estimate, and accuracy.
///
/// The `residual` field is always recomputed from a fresh matrix-vector
/// product by the code that fills it, never copied from a recurrence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub problem: String,
    pub solver: String,
    pub precond: Option<String>,
    pub blocks: Option<u64>,
    pub epsilon: Option<f64>,
    pub n: u64,
    pub nnz: u64,
    pub t_rhs: u64,
    pub order_s: Option<f64>,
    pub symbolic_s: Option<f64>,
    pub factor_s: Option<f64>,
    pub precond_s: Option<f64>,
    pub solve_s: Option<f64>,
    pub total_s: f64,
    pub flops: u64,
    pub iterations: Option<u64>,
    pub fill_density: Option<f64>,
    pub mem_bytes: u64,
    pub x_err: Option<f64>,
    pub residual: Option<f64>,
    pub converged: bool,
    /// Error tag for cells that failed; not part of the CSV schema.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Measured timer resolution in seconds; not part of the CSV schema.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timer_resolution_s: Option<f64>,
}

impl SolveReport {
    /// A report skeleton with every measurement empty, used for failed cells.
    pub fn empty(problem: &str, solver: &str) -> Self {
        SolveReport {
            problem: problem.to_string(),
            solver: solver.to_string(),
            precond: None,
            blocks: None,
            epsilon: None,
            n: 0,
            nnz: 0,
            t_rhs: 0,
            order_s: None,
            symbolic_s: None,
            factor_s: None,
            precond_s: None,
            solve_s: None,
            total_s: 0.0,
            flops: 0,
            iterations: None,
            fill_density: None,
            mem_bytes: 0,
            x_err: None,
            residual: None,
            converged: false,
            error: None,
            timer_resolution_s: None,
        }
    }

    pub fn csv_row(&self) -> String {
        fn opt_f(v: &Option<f64>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        fn opt_u(v: &Option<u64>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        [
            self.problem.clone(),
            self.solver.clone(),
            self.precond.clone().unwrap_or_default(),
            opt_u(&self.blocks),
            opt_f(&self.epsilon),
            self.n.to_string(),
            self.nnz.to_string(),
            self.t_rhs.to_string(),
            opt_f(&self.order_s),
            opt_f(&self.symbolic_s),
            opt_f(&self.factor_s),
            opt_f(&self.precond_s),
            opt_f(&self.solve_s),
            self.total_s.to_string(),
            self.flops.to_string(),
            opt_u(&self.iterations),
            opt_f(&self.fill_density),
            self.mem_bytes.to_string(),
            opt_f(&self.x_err),
            opt_f(&self.residual),
            self.converged.to_string(),
        ]
        .join(",")
    }

    pub fn to_csv(reports: &[SolveReport]) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in reports {
            out.push_str(&r.csv_row());
            out.push('\n');
        }
        out
    }
}

/// Writes reports to `path` in the requested format.
pub fn emit_report(
    reports: &[SolveReport],
    format: ReportFormat,
    path: &Path,
) -> Result<(), MetricsError> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    match format {
        ReportFormat::Csv => {
            w.write_all(SolveReport::to_csv(reports).as_bytes())?;
        }
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut w, reports)?;
            w.write_all(b"\n")?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_json_reports(path: &Path) -> Result<Vec<SolveReport>, MetricsError> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Parses the CSV schema back into reports.
pub fn parse_csv_reports(text: &str) -> Result<Vec<SolveReport>, MetricsError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CSV_HEADER => {}
        _ => {
            return Err(MetricsError::ParseError {
                line: 1,
                message: "missing or unexpected header".into(),
            })
        }
    }
    let mut out = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 21 {
            return Err(MetricsError::ParseError {
                line: idx + 1,
                message: format!("expected 21 fields, found {}", f.len()),
            });
        }
        let err = |message: String| MetricsError::ParseError {
            line: idx + 1,
            message,
        };
        fn opt<T: std::str::FromStr>(s: &str) -> Result<Option<T>, String> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse()
                    .map(Some)
                    .map_err(|_| format!("cannot parse `{s}`"))
            }
        }
        fn req<T: std::str::FromStr>(s: &str, name: &str) -> Result<T, String> {
            s.parse()
                .map_err(|_| format!("cannot parse `{s}` as {name}"))
        }
        out.push(SolveReport {
            problem: f[0].to_string(),
            solver: f[1].to_string(),
            precond: if f[2].is_empty() {
                None
            } else {
                Some(f[2].to_string())
            },
            blocks: opt(f[3]).map_err(&err)?,
            epsilon: opt(f[4]).map_err(&err)?,
            n: req(f[5], "n").map_err(&err)?,
            nnz: req(f[6], "nnz").map_err(&err)?,
            t_rhs: req(f[7], "t_rhs").map_err(&err)?,
            order_s: opt(f[8]).map_err(&err)?,
            symbolic_s: opt(f[9]).map_err(&err)?,
            factor_s: opt(f[10]).map_err(&err)?,
            precond_s: opt(f[11]).map_err(&err)?,
            solve_s: opt(f[12]).map_err(&err)?,
            total_s: req(f[13], "total_s").map_err(&err)?,
            flops: req(f[14], "flops").map_err(&err)?,
            iterations: opt(f[15]).map_err(&err)?,
            fill_density: opt(f[16]).map_err(&err)?,
            mem_bytes: req(f[17], "mem_bytes").map_err(&err)?,
            x_err: opt(f[18]).map_err(&err)?,
            residual: opt(f[19]).map_err(&err)?,
            converged: req(f[20], "converged").map_err(&err)?,
            error: None,
            timer_resolution_s: None,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SolveReport {
        SolveReport {
            problem: "cube12".into(),
            solver: "bicgstab".into(),
            precond: Some("bjacobi".into()),
            blocks: Some(8),
            epsilon: Some(1e-12),
            n: 1728,
            nnz: 8728,
            t_rhs: 1,
            order_s: None,
            symbolic_s: None,
            factor_s: None,
            precond_s: Some(0.01234567890123),
            solve_s: Some(0.1),
            total_s: 0.11234567890123,
            flops: 123456789,
            iterations: Some(42),
            fill_density: None,
            mem_bytes: 204800,
            x_err: Some(3.141592653589793e-11),
            residual: Some(9.87654321e-13),
            converged: true,
            error: None,
            timer_resolution_s: None,
        }
    }

    #[test]
    fn empty_list_yields_header_only() {
        let text = SolveReport::to_csv(&[]);
        assert_eq!(text, format!("{CSV_HEADER}\n"));
        assert!(parse_csv_reports(&text).unwrap().is_empty());
    }

    #[test]
    fn one_report_yields_two_lines() {
        let text = SolveReport::to_csv(&[sample()]);
        assert_eq!(text.lines().count(), 2);
    }

    #[test]
    fn csv_round_trip_preserves_values_exactly() {
        let reports = vec![sample(), SolveReport::empty("cube4", "direct-natural")];
        let text = SolveReport::to_csv(&reports);
        let back = parse_csv_reports(&text).unwrap();
        assert_eq!(back, reports);
    }

    #[test]
    fn json_round_trip_is_field_equal() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        let reports = vec![sample()];
        emit_report(&reports, ReportFormat::Json, &path).unwrap();
        let back = read_json_reports(&path).unwrap();
        assert_eq!(back, reports);
    }

    #[test]
    fn csv_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let reports = vec![sample()];
        emit_report(&reports, ReportFormat::Csv, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(parse_csv_reports(&text).unwrap(), reports);
    }
}
