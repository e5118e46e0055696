//! Direct-vs-iterative crossover estimates and solver recommendations.
//!
//! With `t` right-hand sides sharing one coefficient matrix, a direct solve
//! costs roughly `T_fact + t * T_slu_solve` (one factorization, then
//! triangular solves), an iterative solve `T_pc + t * T_is_solve` (one
//! preconditioner setup, then one Krylov solve per column). The crossover
//! `t0` is where the two lines meet; past it the direct solver wins.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AdvisorError {
    #[error("analytic cost model needs k_max >= 2, got {0}")]
    DegenerateKmax(u64),
    #[error("incomplete requirements: {0}")]
    IncompleteRequirements(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Measured phase times feeding the empirical crossover formula. All times
/// in seconds, per right-hand side where applicable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossoverInput {
    /// Factorization time of the direct solver (ordering through numeric).
    pub t_fact: f64,
    /// Direct triangular-solve time per right-hand side.
    pub t_slu_solve: f64,
    /// Preconditioner setup time of the iterative solver.
    pub t_pc: f64,
    /// Iterative solve time per right-hand side.
    pub t_is_solve: f64,
}

impl CrossoverInput {
    pub fn new(
        t_fact: f64,
        t_slu_solve: f64,
        t_pc: f64,
        t_is_solve: f64,
    ) -> Result<Self, AdvisorError> {
        for (name, v) in [
            ("t_fact", t_fact),
            ("t_slu_solve", t_slu_solve),
            ("t_pc", t_pc),
            ("t_is_solve", t_is_solve),
        ] {
            if v.is_nan() || v < 0.0 {
                return Err(AdvisorError::InvalidInput(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        Ok(Self {
            t_fact,
            t_slu_solve,
            t_pc,
            t_is_solve,
        })
    }
}

/// Result of the empirical crossover: either the lines cross at a positive
/// number of right-hand sides, or one family is faster for every `t >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CrossoverEstimate {
    Finite(f64),
    IterativeAlwaysFaster,
    DirectAlwaysFaster,
}

impl CrossoverEstimate {
    pub fn finite(&self) -> Option<f64> {
        match self {
            CrossoverEstimate::Finite(t) => Some(*t),
            _ => None,
        }
    }
}

/// `t0 = (T_fact - T_pc) / (T_is_solve - T_slu_solve)` where the lines
/// properly cross; degenerate slopes map to the sentinels.
pub fn empirical_t0(c: &CrossoverInput) -> CrossoverEstimate {
    let slope = c.t_is_solve - c.t_slu_solve;
    let offset = c.t_fact - c.t_pc;
    if slope > 0.0 {
        // Iterative line is steeper: direct wins past the crossing.
        if offset > 0.0 {
            CrossoverEstimate::Finite(offset / slope)
        } else {
            CrossoverEstimate::DirectAlwaysFaster
        }
    } else if slope < 0.0 {
        // Direct line is steeper: iterative wins past the crossing.
        if offset < 0.0 {
            CrossoverEstimate::Finite(offset / slope)
        } else {
            CrossoverEstimate::IterativeAlwaysFaster
        }
    } else if offset >= 0.0 {
        CrossoverEstimate::IterativeAlwaysFaster
    } else {
        CrossoverEstimate::DirectAlwaysFaster
    }
}

/// Inputs of the analytic cost model: `n` unknowns, `m` nonzeros, the worst
/// iteration count `k_max`, and the preconditioning cost `phi_n` in abstract
/// operations (zero when unpreconditioned).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostModelInput {
    pub n: u64,
    pub m: u64,
    pub k_max: u64,
    pub phi_n: f64,
}

impl CostModelInput {
    pub fn new(n: u64, m: u64, k_max: u64, phi_n: f64) -> Result<Self, AdvisorError> {
        if n < 1 {
            return Err(AdvisorError::InvalidInput("n must be at least 1".into()));
        }
        if m < n {
            return Err(AdvisorError::InvalidInput(format!(
                "m = {m} must be at least n = {n}"
            )));
        }
        if k_max < 1 {
            return Err(AdvisorError::InvalidInput(
                "k_max must be at least 1".into(),
            ));
        }
        if phi_n.is_nan() || phi_n < 0.0 {
            return Err(AdvisorError::InvalidInput(format!(
                "phi_n must be non-negative, got {phi_n}"
            )));
        }
        Ok(Self { n, m, k_max, phi_n })
    }
}

/// Analytic crossover `t0 = m / (n (k_max - 1))` from the operation-count
/// model (factorization `O(m)`, triangular solves `O(n)` per column,
/// iterative solves `O(k_max n)` per column). A preconditioning cost
/// `phi(n)` shifts the balance to `t0 = (m - phi(n)) / (n (k_max - 1))`.
///
/// The model charges the factorization a single pass over the nonzeros and
/// so ignores fill-in; it is an optimistic floor for the direct side, not a
/// timing prediction.
pub fn analytic_t0(c: &CostModelInput) -> Result<f64, AdvisorError> {
    if c.k_max < 2 {
        return Err(AdvisorError::DegenerateKmax(c.k_max));
    }
    Ok((c.m as f64 - c.phi_n) / (c.n as f64 * (c.k_max - 1) as f64))
}

/// Application requirements feeding [`recommend`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Requirements {
    /// Target relative solution error.
    pub accuracy_target: f64,
    /// Available memory in bytes.
    pub memory_budget_bytes: f64,
    /// Number of right-hand sides to solve with one coefficient matrix.
    pub rhs_count: u64,
    /// Regular (grid) or irregular (mesh) discretization.
    pub regular_grid: bool,
    /// Unknown count; zero when unknown.
    pub n: u64,
    /// Nonzero count; zero when unknown.
    pub nnz: u64,
    /// Expected LU fill growth relative to the input nonzeros, used by the
    /// memory rule. Full-scale factorizations grow fill by orders of
    /// magnitude, so the default is a deliberately conservative 50.
    pub lu_fill_factor: f64,
    /// Measured phase times, when a calibration run exists.
    pub measured: Option<CrossoverInput>,
    /// Worst-case iteration count for the analytic model.
    pub k_max: Option<u64>,
}

impl Requirements {
    pub fn new(accuracy_target: f64, memory_budget_bytes: f64, rhs_count: u64) -> Self {
        Requirements {
            accuracy_target,
            memory_budget_bytes,
            rhs_count,
            regular_grid: true,
            n: 0,
            nnz: 0,
            lu_fill_factor: DEFAULT_LU_FILL_FACTOR,
            measured: None,
            k_max: None,
        }
    }
}

pub const DEFAULT_LU_FILL_FACTOR: f64 = 50.0;

/// Accuracy below which only a direct solve reliably reaches round-off
/// level.
pub const ROUND_OFF_ACCURACY: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Choice {
    Direct,
    Iterative,
    Either,
}

/// Deterministic recommendation: the decision, the rules that fired in
/// order, and both crossover estimates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Recommendation {
    pub choice: Choice,
    pub rules_fired: Vec<String>,
    pub t0_empirical: Option<f64>,
    pub t0_analytic: Option<f64>,
    pub inputs: Requirements,
}

impl Recommendation {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("recommendation serializes")
    }
}

/// Rule cascade, evaluated in order:
///
/// 1. estimated LU memory (`nnz * lu_fill_factor * 16` bytes) over budget
///    puts the factorization out of reach: iterative;
/// 2. accuracy at round-off level (`<= 1e-14`): direct;
/// 3. more right-hand sides than the crossover `t0` (empirical when
///    measurements exist, analytic otherwise): direct; exactly at the
///    crossover both families cost the same: either;
/// 4. otherwise: iterative.
pub fn recommend(req: &Requirements) -> Result<Recommendation, AdvisorError> {
    if req.accuracy_target.is_nan() || req.accuracy_target <= 0.0 {
        return Err(AdvisorError::IncompleteRequirements(format!(
            "accuracy target must be positive, got {}",
            req.accuracy_target
        )));
    }
    if req.memory_budget_bytes.is_nan() || req.memory_budget_bytes <= 0.0 {
        return Err(AdvisorError::IncompleteRequirements(
            "memory budget must be positive".into(),
        ));
    }
    if req.rhs_count == 0 {
        return Err(AdvisorError::IncompleteRequirements(
            "rhs count must be at least 1".into(),
        ));
    }
    if req.lu_fill_factor.is_nan() || req.lu_fill_factor <= 0.0 {
        return Err(AdvisorError::IncompleteRequirements(
            "LU fill factor must be positive".into(),
        ));
    }

    let mut rules = Vec::new();
    let empirical = req.measured.as_ref().map(empirical_t0);
    let analytic = match req.k_max {
        Some(k) if k >= 2 && req.n >= 1 && req.nnz >= req.n => {
            Some(analytic_t0(&CostModelInput::new(req.n, req.nnz, k, 0.0)?)?)
        }
        _ => None,
    };
    let t0_empirical = empirical.as_ref().and_then(CrossoverEstimate::finite);

    let done = |choice: Choice, rules: Vec<String>| {
        Ok(Recommendation {
            choice,
            rules_fired: rules,
            t0_empirical,
            t0_analytic: analytic,
            inputs: *req,
        })
    };

    // Rule 1: memory.
    let lu_bytes = req.nnz as f64 * req.lu_fill_factor * 16.0;
    if lu_bytes > req.memory_budget_bytes {
        rules.push(format!(
            "rule 1 (memory): estimated LU storage {lu_bytes:.3e} B exceeds budget {:.3e} B; \
             iterative solvers only hold the coefficient matrix",
            req.memory_budget_bytes
        ));
        return done(Choice::Iterative, rules);
    }

    // Rule 2: round-off accuracy.
    if req.accuracy_target <= ROUND_OFF_ACCURACY {
        rules.push(format!(
            "rule 2 (accuracy): target {:.1e} is at round-off level; direct solves reach it",
            req.accuracy_target
        ));
        return done(Choice::Direct, rules);
    }

    // Rule 3: multiple right-hand sides against the crossover.
    let crossover = empirical.or_else(|| analytic.map(CrossoverEstimate::Finite));
    match crossover {
        Some(CrossoverEstimate::Finite(t0)) => {
            let t = req.rhs_count as f64;
            if t > t0 {
                rules.push(format!(
                    "rule 3 (multiple rhs): t = {} exceeds crossover t0 = {t0}; \
                     one factorization amortizes over the solves",
                    req.rhs_count
                ));
                return done(Choice::Direct, rules);
            }
            if t == t0 {
                rules.push(format!(
                    "rule 3 (multiple rhs): t = {} sits exactly at the crossover t0 = {t0}",
                    req.rhs_count
                ));
                return done(Choice::Either, rules);
            }
            rules.push(format!(
                "rule 3 (multiple rhs): t = {} below crossover t0 = {t0}",
                req.rhs_count
            ));
        }
        Some(CrossoverEstimate::DirectAlwaysFaster) => {
            rules.push(
                "rule 3 (multiple rhs): measured phases make the direct solver faster at every t"
                    .into(),
            );
            return done(Choice::Direct, rules);
        }
        Some(CrossoverEstimate::IterativeAlwaysFaster) => {
            rules.push(
                "rule 3 (multiple rhs): measured phases make the iterative solver faster at every t"
                    .into(),
            );
        }
        None => {
            rules.push("rule 3 (multiple rhs): no crossover data; rule skipped".into());
        }
    }

    // Rule 4: default.
    rules.push("rule 4 (default): iterative solvers carry the lowest cost for few rhs".into());
    done(Choice::Iterative, rules)
}

/// Crossover right-hand-side counts reported by a full-scale cluster study
/// of these solver families on systems with about two million unknowns.
/// Reference points only; desk-scale measurements land elsewhere.
pub mod reference {
    /// Block-Jacobi BiCGSTAB vs direct solver with a block of rhs,
    /// regular grid, eps = 1e-8.
    pub const REGULAR_EPS8_BJACOBI_VS_DIRECT_BLOCK: f64 = 290.0;
    /// Same pairing at eps = 1e-12.
    pub const REGULAR_EPS12_BJACOBI_VS_DIRECT_BLOCK: f64 = 165.0;
    /// Same pairing at eps = 1e-15.
    pub const REGULAR_EPS15_BJACOBI_VS_DIRECT_BLOCK: f64 = 120.0;
    /// Same pairing on an irregular grid at eps = 1e-8.
    pub const IRREGULAR_EPS8_BJACOBI_VS_DIRECT_BLOCK: f64 = 15.0;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empirical_formula_value() {
        let c = CrossoverInput::new(100.0, 0.5, 0.0, 1.5).unwrap();
        assert_eq!(empirical_t0(&c), CrossoverEstimate::Finite(100.0));
    }

    #[test]
    fn empirical_degenerate_slope_is_iterative_forever() {
        let c = CrossoverInput::new(10.0, 0.5, 0.0, 0.4).unwrap();
        assert_eq!(empirical_t0(&c), CrossoverEstimate::IterativeAlwaysFaster);
    }

    #[test]
    fn empirical_direct_always_faster() {
        // Direct starts lower and grows slower.
        let c = CrossoverInput::new(1.0, 0.1, 5.0, 0.2).unwrap();
        assert_eq!(empirical_t0(&c), CrossoverEstimate::DirectAlwaysFaster);
    }

    #[test]
    fn empirical_balance_identity() {
        let cases = [
            CrossoverInput::new(100.0, 0.5, 0.0, 1.5).unwrap(),
            CrossoverInput::new(3.25, 0.01, 0.125, 0.75).unwrap(),
            CrossoverInput::new(0.5, 0.9, 7.0, 0.3).unwrap(),
        ];
        for c in cases {
            if let CrossoverEstimate::Finite(t0) = empirical_t0(&c) {
                assert!(t0 > 0.0);
                let direct = c.t_fact + t0 * c.t_slu_solve;
                let iterative = c.t_pc + t0 * c.t_is_solve;
                assert!(
                    (direct - iterative).abs() <= 1e-12 * direct.abs().max(iterative.abs()),
                    "balance violated: {direct} vs {iterative}"
                );
            }
        }
    }

    #[test]
    fn analytic_reference_points() {
        let c = CostModelInput::new(1000, 7000, 8, 0.0).unwrap();
        assert_eq!(analytic_t0(&c).unwrap(), 1.0);
        let c = CostModelInput::new(50, 50, 2, 0.0).unwrap();
        assert_eq!(analytic_t0(&c).unwrap(), 1.0);
        // Full-scale grid numbers: 14 099 408 nonzeros, 2 097 152 unknowns,
        // 128 iterations.
        let c = CostModelInput::new(2_097_152, 14_099_408, 128, 0.0).unwrap();
        let t0 = analytic_t0(&c).unwrap();
        assert_eq!(t0, 14_099_408.0 / (2_097_152.0 * 127.0));
        assert!((t0 - 0.0529).abs() < 1e-4);
    }

    #[test]
    fn analytic_degenerate_kmax_rejected() {
        let c = CostModelInput::new(10, 20, 1, 0.0).unwrap();
        assert!(matches!(
            analytic_t0(&c),
            Err(AdvisorError::DegenerateKmax(1))
        ));
    }

    #[test]
    fn analytic_is_homogeneous() {
        for scale in [2u64, 3, 7, 1000] {
            let a = CostModelInput::new(1_000, 12_345, 17, 0.0).unwrap();
            let b = CostModelInput::new(1_000 * scale, 12_345 * scale, 17, 0.0).unwrap();
            assert_eq!(analytic_t0(&a).unwrap(), analytic_t0(&b).unwrap());
        }
    }

    #[test]
    fn memory_rule_fires_first() {
        let mut req = Requirements::new(1e-6, 1e6, 1);
        req.nnz = 10_000_000;
        req.n = 1_000_000;
        let rec = recommend(&req).unwrap();
        assert_eq!(rec.choice, Choice::Iterative);
        assert!(rec.rules_fired[0].starts_with("rule 1"));
    }

    #[test]
    fn accuracy_rule_picks_direct() {
        let req = Requirements::new(1e-15, 1e12, 1);
        let rec = recommend(&req).unwrap();
        assert_eq!(rec.choice, Choice::Direct);
        assert!(rec.rules_fired[0].starts_with("rule 2"));
    }

    #[test]
    fn crossover_rule_picks_direct_for_many_rhs() {
        let mut req = Requirements::new(1e-8, 1e12, 500);
        req.measured = Some(CrossoverInput::new(100.0, 0.5, 0.0, 1.5).unwrap());
        let rec = recommend(&req).unwrap();
        assert_eq!(rec.choice, Choice::Direct);
        assert_eq!(rec.t0_empirical, Some(100.0));
        assert!(rec.rules_fired.iter().any(|r| r.starts_with("rule 3")));
    }

    #[test]
    fn default_rule_is_iterative() {
        let req = Requirements::new(1e-8, 1e12, 1);
        let rec = recommend(&req).unwrap();
        assert_eq!(rec.choice, Choice::Iterative);
        assert!(rec.rules_fired.last().unwrap().starts_with("rule 4"));
    }

    #[test]
    fn recommendation_is_byte_identical_across_runs() {
        let mut req = Requirements::new(1e-8, 1e12, 500);
        req.measured = Some(CrossoverInput::new(100.0, 0.5, 0.0, 1.5).unwrap());
        let a = recommend(&req).unwrap().to_json();
        let b = recommend(&req).unwrap().to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn recommendation_json_has_contract_fields() {
        let rec = recommend(&Requirements::new(1e-15, 1e12, 1)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&rec.to_json()).unwrap();
        assert_eq!(v["choice"], "direct");
        assert!(v["rules_fired"].is_array());
        assert!(v.get("t0_empirical").is_some());
        assert!(v.get("t0_analytic").is_some());
    }

    #[test]
    fn incomplete_requirements_rejected() {
        assert!(recommend(&Requirements::new(0.0, 1e12, 1)).is_err());
        assert!(recommend(&Requirements::new(1e-8, 0.0, 1)).is_err());
        assert!(recommend(&Requirements::new(1e-8, 1e12, 0)).is_err());
    }

    #[test]
    #[allow(clippy::assertions_on_constants)]
    fn published_reference_crossovers_shrink_with_accuracy() {
        assert_eq!(reference::REGULAR_EPS8_BJACOBI_VS_DIRECT_BLOCK, 290.0);
        assert!(
            reference::REGULAR_EPS15_BJACOBI_VS_DIRECT_BLOCK
                < reference::REGULAR_EPS12_BJACOBI_VS_DIRECT_BLOCK
        );
        assert!(
            reference::REGULAR_EPS12_BJACOBI_VS_DIRECT_BLOCK
                < reference::REGULAR_EPS8_BJACOBI_VS_DIRECT_BLOCK
        );
    }
}
