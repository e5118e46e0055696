//! P1 cotangent Laplacian assembly on tetrahedral meshes.
//!
//! The weight of edge `(i, j)` sums, over the tetrahedra incident to the
//! edge, the length of the opposite edge times the cotangent of the dihedral
//! angle at that opposite edge, divided by 6. The diagonal is the negative
//! row sum, so interior rows of the unscaled operator annihilate linear
//! fields. Weights are computed once per undirected edge, which makes the
//! unscaled matrix symmetric bit for bit.

use super::mesh::{cross3, dot3, signed_volume, sub, TetMesh};
use super::{AnalyticField, AssembledSystem, ProblemError};
use crate::sparse::{CsrMatrix, DenseVector};
use std::collections::BTreeMap;

/// Pairs of local vertex indices forming the 6 edges of a tetrahedron,
/// each listed with the local indices of the opposite edge.
const TET_EDGES: [([usize; 2], [usize; 2]); 6] = [
    ([0, 1], [2, 3]),
    ([0, 2], [1, 3]),
    ([0, 3], [1, 2]),
    ([1, 2], [0, 3]),
    ([1, 3], [0, 2]),
    ([2, 3], [0, 1]),
];

/// `length(opposite edge) * cot(dihedral angle at the opposite edge)` for one
/// tetrahedron, given the edge endpoints `i, j` and the opposite endpoints
/// `k, l`.
fn edge_term(pi: [f64; 3], pj: [f64; 3], pk: [f64; 3], pl: [f64; 3]) -> f64 {
    let e = sub(pl, pk);
    let e_len = dot3(e, e).sqrt();
    // Components of (i - k) and (j - k) orthogonal to the opposite edge; the
    // dihedral angle at (k, l) is the angle between them.
    let a = sub(pi, pk);
    let b = sub(pj, pk);
    let ae = dot3(a, e) / dot3(e, e);
    let be = dot3(b, e) / dot3(e, e);
    let u = [a[0] - ae * e[0], a[1] - ae * e[1], a[2] - ae * e[2]];
    let v = [b[0] - be * e[0], b[1] - be * e[1], b[2] - be * e[2]];
    let cos_part = dot3(u, v);
    let cr = cross3(u, v);
    let sin_part = dot3(cr, cr).sqrt();
    if cos_part == 0.0 {
        // Right dihedral angle contributes exactly zero.
        return 0.0;
    }
    e_len * (cos_part / sin_part)
}

/// Cotangent weight of edge `(i, j)`: the sum of [`edge_term`] over all
/// incident tetrahedra, divided by 6.
pub fn cotangent_weight(mesh: &TetMesh, i: usize, j: usize) -> Result<f64, ProblemError> {
    let mut sum = 0.0;
    let mut found = false;
    for tet in mesh.tets() {
        let pos_i = tet.iter().position(|&v| v == i);
        let pos_j = tet.iter().position(|&v| v == j);
        let (Some(pi), Some(pj)) = (pos_i, pos_j) else {
            continue;
        };
        found = true;
        let others: Vec<usize> = (0..4).filter(|&p| p != pi && p != pj).collect();
        sum += edge_term(
            mesh.vertex(tet[pi]),
            mesh.vertex(tet[pj]),
            mesh.vertex(tet[others[0]]),
            mesh.vertex(tet[others[1]]),
        );
    }
    if !found {
        return Err(ProblemError::NotAnEdge { i, j });
    }
    Ok(sum / 6.0)
}

/// Lumped mass per vertex: the sum of the volumes of the incident tetrahedra.
pub fn vertex_masses(mesh: &TetMesh) -> Vec<f64> {
    let mut masses = vec![0.0; mesh.n_vertices()];
    for (t, tet) in mesh.tets().iter().enumerate() {
        let vol = mesh.tet_volume(t);
        for &v in tet {
            masses[v] += vol;
        }
    }
    masses
}

/// Assembles the raw cotangent operator `L` without boundary handling:
/// `L(i, j) = w(i, j)` on edges, `L(i, i) = -sum_j w(i, j)`.
///
/// Exactly symmetric because each undirected edge weight is computed once
/// and stored at both `(i, j)` and `(j, i)`.
pub fn assemble_cotangent_matrix(mesh: &TetMesh) -> Result<CsrMatrix, ProblemError> {
    let n = mesh.n_vertices();
    // Accumulate per undirected edge, in tetrahedron order, so the value of
    // an edge matches `cotangent_weight` bit for bit.
    let mut weights: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for tet in mesh.tets() {
        for (edge, opposite) in TET_EDGES {
            let (a, b) = (tet[edge[0]], tet[edge[1]]);
            let key = (a.min(b), a.max(b));
            let term = edge_term(
                mesh.vertex(a),
                mesh.vertex(b),
                mesh.vertex(tet[opposite[0]]),
                mesh.vertex(tet[opposite[1]]),
            );
            *weights.entry(key).or_insert(0.0) += term;
        }
    }

    let mut neighbors: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (&(a, b), &sum) in &weights {
        let w = sum / 6.0;
        neighbors[a].push((b, w));
        neighbors[b].push((a, w));
    }

    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    row_ptr.push(0);
    for (i, nbrs) in neighbors.iter_mut().enumerate() {
        nbrs.sort_by_key(|&(j, _)| j);
        // Diagonal is the negative of the off-diagonal sum taken in storage
        // order, so summing the row in that order gives exactly zero.
        let mut diag = 0.0;
        for &(_, w) in nbrs.iter() {
            diag += w;
        }
        diag = -diag;
        let mut placed_diag = false;
        for &(j, w) in nbrs.iter() {
            if !placed_diag && j > i {
                col_idx.push(i);
                values.push(diag);
                placed_diag = true;
            }
            col_idx.push(j);
            values.push(w);
        }
        if !placed_diag {
            col_idx.push(i);
            values.push(diag);
        }
        row_ptr.push(col_idx.len());
    }
    Ok(CsrMatrix::new(n, n, row_ptr, col_idx, values)?)
}

/// Assembles the FEM Laplace system on a tetrahedral mesh.
///
/// Boundary rows become identity rows with `rhs = f(vertex)`; interior rows
/// keep the cotangent operator with a zero right-hand side. With
/// `scale_by_mass`, interior rows are scaled by the inverse lumped vertex
/// mass (the operator becomes the mass-normalized Laplacian, generally not
/// symmetric).
pub fn assemble_fem_laplacian(
    mesh: &TetMesh,
    f: &AnalyticField,
    scale_by_mass: bool,
) -> Result<AssembledSystem, ProblemError> {
    let n = mesh.n_vertices();
    let diag = mesh.bbox_diagonal();
    let vol_floor = 1e-14 * diag * diag * diag;
    for (t, tet) in mesh.tets().iter().enumerate() {
        let vol = signed_volume(
            mesh.vertex(tet[0]),
            mesh.vertex(tet[1]),
            mesh.vertex(tet[2]),
            mesh.vertex(tet[3]),
        );
        if vol < vol_floor {
            return Err(ProblemError::DegenerateTet(t, vol));
        }
    }

    let raw = assemble_cotangent_matrix(mesh)?;
    let masses = vertex_masses(mesh);

    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    let mut rhs = DenseVector::zeros(n);
    let mut ground_truth = DenseVector::zeros(n);
    row_ptr.push(0);
    for i in 0..n {
        let p = mesh.vertex(i);
        ground_truth[i] = f.eval(p);
        if mesh.is_boundary(i) {
            col_idx.push(i);
            values.push(1.0);
            rhs[i] = f.eval(p);
        } else {
            let (cols, vals) = raw.row(i);
            let scale = if scale_by_mass { 1.0 / masses[i] } else { 1.0 };
            for (c, v) in cols.iter().zip(vals) {
                col_idx.push(*c);
                values.push(if scale_by_mass { v * scale } else { *v });
            }
        }
        row_ptr.push(col_idx.len());
    }
    let matrix = CsrMatrix::new(n, n, row_ptr, col_idx, values)?;
    Ok(AssembledSystem {
        matrix,
        rhs,
        ground_truth,
        nodes: mesh.vertices().to_vec(),
        boundary: mesh.boundary_flags().to_vec(),
    })
}
