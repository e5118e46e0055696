//! Problem generation: Laplace systems with Dirichlet data and analytic
//! ground truths.
//!
//! Two families are produced. [`assemble_fd_laplacian`] discretizes the
//! Laplace equation on a regular 3D grid with the 7-point stencil and unit
//! edge weights; [`fem::assemble_fem_laplacian`] assembles the P1 cotangent
//! Laplacian on a tetrahedral mesh. In both cases boundary nodes are kept as
//! identity rows with the boundary value on the right-hand side, which keeps
//! the unknown count equal to the node count and makes the nonzero count of
//! the grid operator a closed form.

pub mod fem;
pub mod mesh;

pub use fem::{assemble_cotangent_matrix, assemble_fem_laplacian, cotangent_weight, vertex_masses};
pub use mesh::{generate_jittered_tet_mesh, read_mesh, write_mesh, TetMesh};

use crate::sparse::{CsrMatrix, DenseBlock, DenseVector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("grid too small: every axis needs at least 3 nodes, got {0}x{1}x{2}")]
    GridTooSmall(usize, usize, usize),
    #[error("grid spacing must be positive, got {0}")]
    NonPositiveSpacing(f64),
    #[error("vertices ({i},{j}) do not share a tetrahedron")]
    NotAnEdge { i: usize, j: usize },
    #[error("tetrahedron {0} is degenerate (volume {1:.3e})")]
    DegenerateTet(usize, f64),
    #[error("tetrahedron {tet} has non-positive volume {volume:.3e}")]
    NonPositiveVolume { tet: usize, volume: f64 },
    #[error("vertex {0} is not referenced by any tetrahedron")]
    UnreferencedVertex(usize),
    #[error("tetrahedron {tet} references vertex {index} but only {n_vertices} vertices exist")]
    InvalidIndex {
        tet: usize,
        index: usize,
        n_vertices: usize,
    },
    #[error("jitter {0} too large: positive volumes unreachable after 8 halvings")]
    JitterTooLarge(f64),
    #[error("jitter must lie in [0, 0.3], got {0}")]
    JitterOutOfRange(f64),
    #[error("cells per axis must be at least 2, got {0}")]
    TooFewCells(usize),
    #[error("right-hand-side family needs at least one column")]
    EmptyRhsFamily,
    #[error("parse error at line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Sparse(#[from] crate::sparse::SparseError),
}

/// Regular grid of `nx * ny * nz` nodes with uniform spacing `h`.
///
/// Nodes are numbered lexicographically with x fastest, so node
/// `(ix, iy, iz)` has index `ix + nx*(iy + ny*iz)` and sits at
/// `(ix*h, iy*h, iz*h)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularGrid3 {
    nx: usize,
    ny: usize,
    nz: usize,
    h: f64,
}

impl RegularGrid3 {
    pub fn new(nx: usize, ny: usize, nz: usize, h: f64) -> Result<Self, ProblemError> {
        if nx < 3 || ny < 3 || nz < 3 {
            return Err(ProblemError::GridTooSmall(nx, ny, nz));
        }
        if h <= 0.0 {
            return Err(ProblemError::NonPositiveSpacing(h));
        }
        Ok(Self { nx, ny, nz, h })
    }

    /// Cubic grid spanning the unit cube: `n` nodes per axis, `h = 1/(n-1)`.
    pub fn cube(n: usize) -> Result<Self, ProblemError> {
        if n < 3 {
            return Err(ProblemError::GridTooSmall(n, n, n));
        }
        Self::new(n, n, n, 1.0 / (n - 1) as f64)
    }

    pub fn n_nodes(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.nx, self.ny, self.nz)
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        ix + self.nx * (iy + self.ny * iz)
    }

    pub fn coords(&self, ix: usize, iy: usize, iz: usize) -> [f64; 3] {
        [ix as f64 * self.h, iy as f64 * self.h, iz as f64 * self.h]
    }

    pub fn is_boundary(&self, ix: usize, iy: usize, iz: usize) -> bool {
        ix == 0 || iy == 0 || iz == 0 || ix == self.nx - 1 || iy == self.ny - 1 || iz == self.nz - 1
    }

    /// Number of interior nodes, `(nx-2)(ny-2)(nz-2)`.
    pub fn n_interior(&self) -> usize {
        (self.nx - 2) * (self.ny - 2) * (self.nz - 2)
    }
}

/// Number of nonzeros of the assembled grid operator:
/// `7 * interior + boundary` (interior rows hold the 7-point stencil,
/// boundary rows a single diagonal entry).
pub fn fd_laplacian_nnz(nx: usize, ny: usize, nz: usize) -> u64 {
    let n = (nx * ny * nz) as u64;
    let interior = ((nx - 2) * (ny - 2) * (nz - 2)) as u64;
    7 * interior + (n - interior)
}

/// Analytic fields with vanishing Laplacian, used as Dirichlet data and as
/// ground truth by sampling at the nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticField {
    /// `u = a*x + b*y + c*z + d`
    Linear { a: f64, b: f64, c: f64, d: f64 },
    /// `u = x^2 + y^2 - 2 z^2`
    QuadHarmonic,
    /// `u = sin(x) * sinh(y)`
    TrigHarmonic,
}

impl AnalyticField {
    pub fn eval(&self, p: [f64; 3]) -> f64 {
        let [x, y, z] = p;
        match *self {
            AnalyticField::Linear { a, b, c, d } => a * x + b * y + c * z + d,
            AnalyticField::QuadHarmonic => x * x + y * y - 2.0 * z * z,
            AnalyticField::TrigHarmonic => x.sin() * y.sinh(),
        }
    }
}

/// A fully assembled linear system with its sampled exact solution.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub matrix: CsrMatrix,
    pub rhs: DenseVector,
    pub ground_truth: DenseVector,
    /// Node coordinates, in row order of the matrix.
    pub nodes: Vec<[f64; 3]>,
    /// Boundary flag per node.
    pub boundary: Vec<bool>,
}

/// Assembles the 7-point finite difference Laplacian on a regular grid.
///
/// Interior rows carry `+1` for each of the 6 axis neighbours and `-6` on
/// the diagonal with a zero right-hand side; boundary rows are identity rows
/// with `rhs = f(node)`. The ground truth is `f` sampled at every node.
pub fn assemble_fd_laplacian(
    grid: &RegularGrid3,
    f: &AnalyticField,
) -> Result<AssembledSystem, ProblemError> {
    let (nx, ny, nz) = grid.dims();
    let n = grid.n_nodes();
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::with_capacity(fd_laplacian_nnz(nx, ny, nz) as usize);
    let mut values = Vec::with_capacity(col_idx.capacity());
    let mut rhs = DenseVector::zeros(n);
    let mut ground_truth = DenseVector::zeros(n);
    let mut nodes = Vec::with_capacity(n);
    let mut boundary = Vec::with_capacity(n);

    row_ptr.push(0);
    for iz in 0..nz {
        for iy in 0..ny {
            for ix in 0..nx {
                let i = grid.index(ix, iy, iz);
                let p = grid.coords(ix, iy, iz);
                nodes.push(p);
                ground_truth[i] = f.eval(p);
                if grid.is_boundary(ix, iy, iz) {
                    boundary.push(true);
                    col_idx.push(i);
                    values.push(1.0);
                    rhs[i] = f.eval(p);
                } else {
                    boundary.push(false);
                    // Neighbour offsets in ascending index order keep the row sorted.
                    let nbrs = [
                        grid.index(ix, iy, iz - 1),
                        grid.index(ix, iy - 1, iz),
                        grid.index(ix - 1, iy, iz),
                        grid.index(ix + 1, iy, iz),
                        grid.index(ix, iy + 1, iz),
                        grid.index(ix, iy, iz + 1),
                    ];
                    for &j in &nbrs[..3] {
                        col_idx.push(j);
                        values.push(1.0);
                    }
                    col_idx.push(i);
                    values.push(-6.0);
                    for &j in &nbrs[3..] {
                        col_idx.push(j);
                        values.push(1.0);
                    }
                }
                row_ptr.push(col_idx.len());
            }
        }
    }
    let matrix = CsrMatrix::new(n, n, row_ptr, col_idx, values)?;
    debug_assert_eq!(matrix.nnz() as u64, fd_laplacian_nnz(nx, ny, nz));
    Ok(AssembledSystem {
        matrix,
        rhs,
        ground_truth,
        nodes,
        boundary,
    })
}

/// Family of right-hand sides sharing the coefficient matrix.
///
/// Column `s` carries the boundary data of the rotating linear field
/// `u_s(x, y, z) = cos(theta_s) x + sin(theta_s) y` with
/// `theta_s = s * pi / (2t)`, zero on interior rows.
#[derive(Debug, Clone)]
pub struct RhsFamily {
    pub rhs: DenseBlock,
    pub ground_truth: DenseBlock,
}

pub fn make_rhs_family(system: &AssembledSystem, t: usize) -> Result<RhsFamily, ProblemError> {
    if t == 0 {
        return Err(ProblemError::EmptyRhsFamily);
    }
    let n = system.matrix.n_rows();
    let mut rhs = DenseBlock::zeros(n, t);
    let mut gt = DenseBlock::zeros(n, t);
    for s in 0..t {
        let theta = s as f64 * std::f64::consts::PI / (2.0 * t as f64);
        let field = AnalyticField::Linear {
            a: theta.cos(),
            b: theta.sin(),
            c: 0.0,
            d: 0.0,
        };
        let rcol = rhs.col_mut(s);
        for (i, p) in system.nodes.iter().enumerate() {
            if system.boundary[i] {
                rcol[i] = field.eval(*p);
            }
        }
        let gcol = gt.col_mut(s);
        for (i, p) in system.nodes.iter().enumerate() {
            gcol[i] = field.eval(*p);
        }
    }
    Ok(RhsFamily {
        rhs,
        ground_truth: gt,
    })
}
