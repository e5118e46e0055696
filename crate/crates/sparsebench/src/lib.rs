//! Sparse linear-algebra engine and benchmark harness for PDE-derived systems.
//!
//! The crate compares the two classic families of sparse solvers on Laplace
//! problems:
//!
//! * **direct**: sparse LU with a fill-reducing ordering, symbolic and
//!   numeric factorization, and triangular solves ([`direct`]);
//! * **iterative**: preconditioned Krylov methods (BiCGSTAB and restarted
//!   GMRES) with Jacobi, block-Jacobi, and ILU(0) preconditioners
//!   ([`iterative`]).
//!
//! Problems come from two generators ([`problem`]): a 7-point finite
//! difference Laplacian on regular 3D grids and a P1 cotangent Laplacian on
//! tetrahedral meshes, both with Dirichlet boundary data sampled from
//! analytic harmonic fields so that every solve has a known ground truth.
//!
//! On top of the solvers sit a metrics harness ([`metrics`]) that records
//! residuals, errors, flop counts, timings, and memory estimates into
//! machine-readable reports, and an advisor ([`advisor`]) that computes the
//! direct-vs-iterative crossover point in the number of right-hand sides and
//! turns measurements into a solver recommendation.
//!
//! Start with the runnable programs under `examples/`, one per capability,
//! or with the `sparsebench` binary (`gen`, `solve`, `bench`, `crossover`,
//! `advise`).

pub mod advisor;
pub mod cli;
pub mod direct;
pub mod flops;
pub mod iterative;
pub mod metrics;
pub mod problem;
pub mod sparse;

pub use flops::FlopCounter;
pub use sparse::{CooTriplets, CsrMatrix, DenseBlock, DenseVector, Permutation};
