//! Tetrahedral meshes: construction, jittered lattice generation, text IO.
//!
//! Mesh text format: line 1 `V T`, then `V` vertex lines `x y z flag`
//! (flag 1 marks a boundary vertex) and `T` tetrahedron lines
//! `i0 i1 i2 i3` with 0-based indices. Lines starting with `%` are comments.

use super::ProblemError;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

/// Tetrahedral mesh with a boundary flag per vertex.
///
/// Every tetrahedron has strictly positive signed volume under the stored
/// vertex order, and every vertex is referenced by at least one tetrahedron.
#[derive(Debug, Clone, PartialEq)]
pub struct TetMesh {
    vertices: Vec<[f64; 3]>,
    tets: Vec<[usize; 4]>,
    boundary: Vec<bool>,
}

impl TetMesh {
    pub fn new(
        vertices: Vec<[f64; 3]>,
        tets: Vec<[usize; 4]>,
        boundary: Vec<bool>,
    ) -> Result<Self, ProblemError> {
        assert_eq!(vertices.len(), boundary.len());
        let mut referenced = vec![false; vertices.len()];
        for (t, tet) in tets.iter().enumerate() {
            for &v in tet {
                if v >= vertices.len() {
                    return Err(ProblemError::InvalidIndex {
                        tet: t,
                        index: v,
                        n_vertices: vertices.len(),
                    });
                }
                referenced[v] = true;
            }
            let vol = signed_volume(
                vertices[tet[0]],
                vertices[tet[1]],
                vertices[tet[2]],
                vertices[tet[3]],
            );
            if vol <= 0.0 {
                return Err(ProblemError::NonPositiveVolume {
                    tet: t,
                    volume: vol,
                });
            }
        }
        if let Some(v) = referenced.iter().position(|r| !r) {
            return Err(ProblemError::UnreferencedVertex(v));
        }
        Ok(Self {
            vertices,
            tets,
            boundary,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_tets(&self) -> usize {
        self.tets.len()
    }

    pub fn vertex(&self, i: usize) -> [f64; 3] {
        self.vertices[i]
    }

    pub fn vertices(&self) -> &[[f64; 3]] {
        &self.vertices
    }

    pub fn tets(&self) -> &[[usize; 4]] {
        &self.tets
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        self.boundary[i]
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    pub fn tet_volume(&self, t: usize) -> f64 {
        let [a, b, c, d] = self.tets[t];
        signed_volume(
            self.vertices[a],
            self.vertices[b],
            self.vertices[c],
            self.vertices[d],
        )
    }

    /// Diagonal of the axis-aligned bounding box.
    pub fn bbox_diagonal(&self) -> f64 {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for v in &self.vertices {
            for k in 0..3 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        let d = [hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]];
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }
}

pub(crate) fn signed_volume(a: [f64; 3], b: [f64; 3], c: [f64; 3], d: [f64; 3]) -> f64 {
    let u = sub(b, a);
    let v = sub(c, a);
    let w = sub(d, a);
    det3(u, v, w) / 6.0
}

pub(crate) fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn det3(u: [f64; 3], v: [f64; 3], w: [f64; 3]) -> f64 {
    dot3(u, cross3(v, w))
}

/// Generates a tetrahedral mesh on the unit cube: `(k+1)^3` lattice vertices,
/// each cell split into 6 tetrahedra, interior vertices displaced by a seeded
/// uniform perturbation of at most `jitter * h` per coordinate.
///
/// A displacement that would flip an incident tetrahedron is retried with
/// halved magnitude; after 8 failed halvings the jitter is declared too
/// large. Boundary vertices stay on the lattice and are flagged. The same
/// seed reproduces the same mesh bit for bit.
pub fn generate_jittered_tet_mesh(
    k: usize,
    jitter: f64,
    seed: u64,
) -> Result<TetMesh, ProblemError> {
    if k < 2 {
        return Err(ProblemError::TooFewCells(k));
    }
    if !(0.0..=0.3).contains(&jitter) {
        return Err(ProblemError::JitterOutOfRange(jitter));
    }
    let np = k + 1;
    let h = 1.0 / k as f64;
    let idx = |ix: usize, iy: usize, iz: usize| ix + np * (iy + np * iz);

    let mut vertices = Vec::with_capacity(np * np * np);
    let mut boundary = Vec::with_capacity(np * np * np);
    for iz in 0..np {
        for iy in 0..np {
            for ix in 0..np {
                vertices.push([ix as f64 * h, iy as f64 * h, iz as f64 * h]);
                boundary.push(ix == 0 || iy == 0 || iz == 0 || ix == k || iy == k || iz == k);
            }
        }
    }

    // Kuhn split: each cell yields one tetrahedron per permutation of the
    // three axis steps from the low corner to the high corner.
    const AXIS_ORDERS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut tets = Vec::with_capacity(6 * k * k * k);
    for cz in 0..k {
        for cy in 0..k {
            for cx in 0..k {
                for order in AXIS_ORDERS {
                    let mut corner = [cx, cy, cz];
                    let mut tet = [idx(corner[0], corner[1], corner[2]), 0, 0, 0];
                    for (step, &axis) in order.iter().enumerate() {
                        corner[axis] += 1;
                        tet[step + 1] = idx(corner[0], corner[1], corner[2]);
                    }
                    // Odd permutations produce mirrored tetrahedra; swap two
                    // vertices to restore positive orientation.
                    if signed_volume(
                        vertices[tet[0]],
                        vertices[tet[1]],
                        vertices[tet[2]],
                        vertices[tet[3]],
                    ) < 0.0
                    {
                        tet.swap(1, 2);
                    }
                    tets.push(tet);
                }
            }
        }
    }

    if jitter > 0.0 {
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
        for (t, tet) in tets.iter().enumerate() {
            for &v in tet {
                incident[v].push(t);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for v in 0..vertices.len() {
            if boundary[v] {
                continue;
            }
            let base = vertices[v];
            let mut d = [
                rng.gen_range(-1.0..=1.0) * jitter * h,
                rng.gen_range(-1.0..=1.0) * jitter * h,
                rng.gen_range(-1.0..=1.0) * jitter * h,
            ];
            let mut placed = false;
            for _ in 0..=8 {
                vertices[v] = [base[0] + d[0], base[1] + d[1], base[2] + d[2]];
                let ok = incident[v].iter().all(|&t| {
                    let [a, b, c, e] = tets[t];
                    signed_volume(vertices[a], vertices[b], vertices[c], vertices[e]) > 0.0
                });
                if ok {
                    placed = true;
                    break;
                }
                d = [d[0] / 2.0, d[1] / 2.0, d[2] / 2.0];
            }
            if !placed {
                vertices[v] = base;
                return Err(ProblemError::JitterTooLarge(jitter));
            }
        }
    }

    TetMesh::new(vertices, tets, boundary)
}

pub fn write_mesh(mesh: &TetMesh, path: &Path) -> Result<(), ProblemError> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    writeln!(w, "{} {}", mesh.n_vertices(), mesh.n_tets())?;
    for (v, flag) in mesh.vertices.iter().zip(&mesh.boundary) {
        writeln!(w, "{} {} {} {}", v[0], v[1], v[2], u8::from(*flag))?;
    }
    for t in &mesh.tets {
        writeln!(w, "{} {} {} {}", t[0], t[1], t[2], t[3])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_mesh(path: &Path) -> Result<TetMesh, ProblemError> {
    let file = std::fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut vertices: Vec<[f64; 3]> = Vec::new();
    let mut boundary: Vec<bool> = Vec::new();
    let mut tets: Vec<[usize; 4]> = Vec::new();
    let mut counts: Option<(usize, usize)> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        match counts {
            None => {
                if fields.len() != 2 {
                    return Err(ProblemError::ParseError {
                        line: line_no,
                        message: "expected header `V T`".into(),
                    });
                }
                let v = parse(fields[0], line_no, "vertex count")?;
                let t = parse(fields[1], line_no, "tet count")?;
                if t == 0 {
                    return Err(ProblemError::ParseError {
                        line: line_no,
                        message: "meshes must contain at least one tetrahedron".into(),
                    });
                }
                counts = Some((v, t));
            }
            Some((v, _)) if vertices.len() < v => {
                if fields.len() != 4 {
                    return Err(ProblemError::ParseError {
                        line: line_no,
                        message: "expected `x y z flag`".into(),
                    });
                }
                let x: f64 = parse(fields[0], line_no, "x")?;
                let y: f64 = parse(fields[1], line_no, "y")?;
                let z: f64 = parse(fields[2], line_no, "z")?;
                let flag: u8 = parse(fields[3], line_no, "boundary flag")?;
                if flag > 1 {
                    return Err(ProblemError::ParseError {
                        line: line_no,
                        message: format!("boundary flag must be 0 or 1, got {flag}"),
                    });
                }
                vertices.push([x, y, z]);
                boundary.push(flag == 1);
            }
            Some(_) => {
                if fields.len() != 4 {
                    return Err(ProblemError::ParseError {
                        line: line_no,
                        message: "expected `i0 i1 i2 i3`".into(),
                    });
                }
                let mut tet = [0usize; 4];
                for (k, f) in fields.iter().enumerate() {
                    tet[k] = parse(f, line_no, "vertex index")?;
                }
                tets.push(tet);
            }
        }
    }
    let (v, t) = counts.ok_or(ProblemError::ParseError {
        line: 0,
        message: "missing header line".into(),
    })?;
    if vertices.len() != v || tets.len() != t {
        return Err(ProblemError::ParseError {
            line: 0,
            message: format!(
                "header promised {v} vertices and {t} tets, found {} and {}",
                vertices.len(),
                tets.len()
            ),
        });
    }
    TetMesh::new(vertices, tets, boundary)
}

fn parse<T: std::str::FromStr>(raw: &str, line: usize, name: &str) -> Result<T, ProblemError> {
    raw.parse().map_err(|_| ProblemError::ParseError {
        line,
        message: format!("cannot parse `{raw}` as {name}"),
    })
}
