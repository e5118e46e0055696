//! Solver recommendations from the rule cascade: memory first, accuracy
//! second, the right-hand-side crossover third.
//!
//! ```bash
//! cargo run --release --example solver_advisor
//! ```

use sparsebench::advisor::{recommend, CrossoverInput, Requirements};

fn main() {
    // A huge system against a small memory budget.
    let mut memory_bound = Requirements::new(1e-8, 8e9, 1);
    memory_bound.n = 134_217_728;
    memory_bound.nnz = 930_123_728;
    show("512^3 system, 8 GB budget", &memory_bound);

    // Round-off accuracy demanded.
    let mut accuracy = Requirements::new(1e-15, 1e12, 1);
    accuracy.n = 2_097_152;
    accuracy.nnz = 14_099_408;
    show("accuracy 1e-15", &accuracy);

    // Many right-hand sides with a measured crossover.
    let mut many_rhs = Requirements::new(1e-8, 1e12, 500);
    many_rhs.n = 2_097_152;
    many_rhs.nnz = 14_099_408;
    many_rhs.measured = Some(CrossoverInput::new(120.0, 0.05, 0.01, 0.45).unwrap());
    show("t = 500 with measurements", &many_rhs);

    // Few right-hand sides, moderate accuracy: the default case.
    let mut few_rhs = Requirements::new(1e-8, 1e12, 4);
    few_rhs.n = 2_097_152;
    few_rhs.nnz = 14_099_408;
    few_rhs.k_max = Some(128);
    show("t = 4, analytic model only", &few_rhs);
}

fn show(label: &str, req: &Requirements) {
    let rec = recommend(req).unwrap();
    println!("== {label}");
    println!("{}\n", rec.to_json());
}
