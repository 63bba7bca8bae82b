//! Rest geometry, topology and mass lumping for tetrahedral meshes and
//! spring networks, plus the vertex incidence and coloring used by the
//! parallel solver.

mod adjacency;
mod coloring;
pub mod io;
mod springs;

use std::collections::HashMap;

use thiserror::Error;

use crate::math::{inverse3, Mat3, Vec3};

pub use adjacency::{Incidence, VertexAdjacency};
pub use coloring::{degree_order, greedy_color, ColorPartition};
pub use springs::{Spring, SpringNet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("mesh needs at least {needed} vertices, got {got}")]
    TooFewVertices { needed: usize, got: usize },
    #[error("element {element} references vertex {index}, but there are only {count} vertices")]
    IndexOutOfRange {
        element: usize,
        index: usize,
        count: usize,
    },
    #[error("tet {tet} is degenerate or inverted (rest volume {volume:e})")]
    DegenerateTet { tet: usize, volume: f64 },
    #[error("vertex {0} belongs to no element and would carry no mass")]
    OrphanVertex(usize),
    #[error("spring {spring} is invalid: {reason}")]
    InvalidSpring { spring: usize, reason: String },
    #[error("density must be positive and finite, got {0}")]
    InvalidDensity(f64),
}

/// Local vertex slots of the four faces of a positively oriented tet, wound
/// counter-clockwise when seen from outside.
pub const TET_FACES: [[usize; 3]; 4] = [[1, 2, 3], [0, 3, 2], [0, 1, 3], [0, 2, 1]];

#[derive(Debug, Clone)]
pub struct TetMesh {
    pub rest_positions: Vec<Vec3>,
    pub tets: Vec<[usize; 4]>,
    pub surface_tris: Vec<[usize; 3]>,
    pub surface_edges: Vec<[usize; 2]>,
    pub rest_volumes: Vec<f64>,
    /// Inverse of the rest edge matrix `[x1 - x0, x2 - x0, x3 - x0]`.
    pub inv_rest_shape: Vec<Mat3>,
    pub masses: Vec<f64>,
    pub density: f64,
}

/// Edge matrix `[x1 - x0, x2 - x0, x3 - x0]` of a tet.
pub fn edge_matrix(positions: &[Vec3], tet: &[usize; 4]) -> Mat3 {
    let x0 = positions[tet[0]];
    Mat3::from_columns(&[
        positions[tet[1]] - x0,
        positions[tet[2]] - x0,
        positions[tet[3]] - x0,
    ])
}

pub fn bounding_box(points: &[Vec3]) -> (Vec3, Vec3) {
    let mut lo = Vec3::repeat(f64::INFINITY);
    let mut hi = Vec3::repeat(f64::NEG_INFINITY);
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (lo, hi)
}

/// Builds a tet mesh, lumping a quarter of each tet's mass onto its vertices
/// and extracting the outward-oriented boundary surface.
pub fn build_tet_mesh(
    rest_positions: Vec<Vec3>,
    tets: Vec<[usize; 4]>,
    density: f64,
) -> Result<TetMesh, MeshError> {
    let n = rest_positions.len();
    if n < 4 {
        return Err(MeshError::TooFewVertices { needed: 4, got: n });
    }
    if !(density > 0.0 && density.is_finite()) {
        return Err(MeshError::InvalidDensity(density));
    }
    for (t, tet) in tets.iter().enumerate() {
        if let Some(&index) = tet.iter().find(|&&v| v >= n) {
            return Err(MeshError::IndexOutOfRange {
                element: t,
                index,
                count: n,
            });
        }
    }

    let (lo, hi) = bounding_box(&rest_positions);
    let diag = (hi - lo).norm();
    let min_volume = 1e-12 * diag.powi(3);

    let mut rest_volumes = Vec::with_capacity(tets.len());
    let mut inv_rest_shape = Vec::with_capacity(tets.len());
    let mut masses = vec![0.0; n];
    for (t, tet) in tets.iter().enumerate() {
        let dm = edge_matrix(&rest_positions, tet);
        let volume = dm.determinant() / 6.0;
        if !(volume > min_volume) {
            return Err(MeshError::DegenerateTet { tet: t, volume });
        }
        let inv = inverse3(&dm).ok_or(MeshError::DegenerateTet { tet: t, volume })?;
        rest_volumes.push(volume);
        inv_rest_shape.push(inv);
        let quarter = density * volume / 4.0;
        for &v in tet {
            masses[v] += quarter;
        }
    }
    if let Some(orphan) = masses.iter().position(|&m| m <= 0.0) {
        return Err(MeshError::OrphanVertex(orphan));
    }

    let surface_tris = extract_surface(&tets);
    let surface_edges = unique_edges(&surface_tris);
    Ok(TetMesh {
        rest_positions,
        tets,
        surface_tris,
        surface_edges,
        rest_volumes,
        inv_rest_shape,
        masses,
        density,
    })
}

/// Faces owned by exactly one tet, in tet order, wound outward.
pub fn extract_surface(tets: &[[usize; 4]]) -> Vec<[usize; 3]> {
    let key = |f: [usize; 3]| {
        let mut k = f;
        k.sort_unstable();
        k
    };
    let mut counts: HashMap<[usize; 3], u32> = HashMap::new();
    for tet in tets {
        for face in TET_FACES {
            *counts
                .entry(key(face.map(|s| tet[s])))
                .or_default() += 1;
        }
    }
    let mut surface = Vec::new();
    for tet in tets {
        for face in TET_FACES {
            let f = face.map(|s| tet[s]);
            if counts[&key(f)] == 1 {
                surface.push(f);
            }
        }
    }
    surface
}

/// Unique undirected edges of a triangle list, in order of first appearance.
pub fn unique_edges(tris: &[[usize; 3]]) -> Vec<[usize; 2]> {
    let mut seen = std::collections::HashSet::new();
    let mut edges = Vec::new();
    for tri in tris {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            let e = [a.min(b), a.max(b)];
            if seen.insert(e) {
                edges.push(e);
            }
        }
    }
    edges
}

impl TetMesh {
    pub fn num_vertices(&self) -> usize {
        self.rest_positions.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn total_volume(&self) -> f64 {
        self.rest_volumes.iter().sum()
    }

    pub fn incidence(&self) -> VertexAdjacency {
        VertexAdjacency::build(self.num_vertices(), self.tets.iter())
    }

    /// Signed volume of every tet at `positions`.
    pub fn volume_at(&self, positions: &[Vec3]) -> f64 {
        self.tets
            .iter()
            .map(|t| edge_matrix(positions, t).determinant() / 6.0)
            .sum()
    }

    /// Applies `f` to every rest position, recomputing the derived quantities.
    pub fn transformed(&self, f: impl Fn(&Vec3) -> Vec3) -> Result<TetMesh, MeshError> {
        build_tet_mesh(
            self.rest_positions.iter().map(f).collect(),
            self.tets.clone(),
            self.density,
        )
    }
}
