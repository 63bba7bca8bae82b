use std::collections::HashMap;

use rayon::prelude::*;

use crate::math::Vec3;

/// Surface and volume primitives of the whole scene, in global vertex ids.
#[derive(Debug, Clone, Default)]
pub struct CollisionMesh {
    pub triangles: Vec<[usize; 3]>,
    pub edges: Vec<[usize; 2]>,
    pub surface_vertices: Vec<usize>,
    pub tets: Vec<[usize; 4]>,
    pub vertex_body: Vec<usize>,
    pub triangle_body: Vec<usize>,
    pub tet_body: Vec<usize>,
    pub fixed: Vec<bool>,
    pub cell_size: f64,
}

impl CollisionMesh {
    /// `positions` only sets the hash cell size (twice the mean surface edge
    /// length).
    pub fn new(
        triangles: Vec<[usize; 3]>,
        edges: Vec<[usize; 2]>,
        tets: Vec<[usize; 4]>,
        vertex_body: Vec<usize>,
        fixed: Vec<bool>,
        positions: &[Vec3],
    ) -> Self {
        let mut surface_vertices: Vec<usize> = triangles.iter().flatten().copied().collect();
        surface_vertices.sort_unstable();
        surface_vertices.dedup();
        let triangle_body = triangles.iter().map(|t| vertex_body[t[0]]).collect();
        let tet_body = tets.iter().map(|t| vertex_body[t[0]]).collect();
        let mean_edge = if edges.is_empty() {
            1.0
        } else {
            edges
                .iter()
                .map(|e| (positions[e[1]] - positions[e[0]]).norm())
                .sum::<f64>()
                / edges.len() as f64
        };
        Self {
            triangles,
            edges,
            surface_vertices,
            tets,
            vertex_body,
            triangle_body,
            tet_body,
            fixed,
            cell_size: (2.0 * mean_edge).max(1e-9),
        }
    }

    pub fn num_bodies(&self) -> usize {
        self.vertex_body.iter().max().map_or(0, |b| b + 1)
    }

    fn all_fixed(&self, ids: impl IntoIterator<Item = usize>) -> bool {
        ids.into_iter().all(|v| self.fixed[v])
    }
}

/// Uniform spatial hash over axis-aligned boxes.
#[derive(Debug, Clone)]
pub struct SpatialHash {
    cell: f64,
    cells: HashMap<[i64; 3], Vec<u32>>,
}

impl SpatialHash {
    pub fn new(cell: f64) -> Self {
        Self {
            cell,
            cells: HashMap::new(),
        }
    }

    fn key(&self, p: &Vec3) -> [i64; 3] {
        [
            (p.x / self.cell).floor() as i64,
            (p.y / self.cell).floor() as i64,
            (p.z / self.cell).floor() as i64,
        ]
    }

    fn for_cells(&self, lo: &Vec3, hi: &Vec3, mut f: impl FnMut([i64; 3])) {
        let (a, b) = (self.key(lo), self.key(hi));
        for i in a[0]..=b[0] {
            for j in a[1]..=b[1] {
                for k in a[2]..=b[2] {
                    f([i, j, k]);
                }
            }
        }
    }

    pub fn insert(&mut self, id: u32, lo: &Vec3, hi: &Vec3) {
        let mut keys = Vec::new();
        self.for_cells(lo, hi, |k| keys.push(k));
        for k in keys {
            self.cells.entry(k).or_default().push(id);
        }
    }

    /// Ids whose boxes share a cell with `[lo, hi]`, sorted and unique.
    pub fn query(&self, lo: &Vec3, hi: &Vec3, out: &mut Vec<u32>) {
        out.clear();
        self.for_cells(lo, hi, |k| {
            if let Some(ids) = self.cells.get(&k) {
                out.extend_from_slice(ids);
            }
        });
        out.sort_unstable();
        out.dedup();
    }
}

pub(crate) fn aabb<'a>(points: impl IntoIterator<Item = &'a Vec3>, margin: f64) -> (Vec3, Vec3) {
    let mut lo = Vec3::repeat(f64::INFINITY);
    let mut hi = Vec3::repeat(f64::NEG_INFINITY);
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (lo.add_scalar(-margin), hi.add_scalar(margin))
}

fn overlaps(a: &(Vec3, Vec3), b: &(Vec3, Vec3)) -> bool {
    (0..3).all(|k| a.0[k] <= b.1[k] && b.0[k] <= a.1[k])
}

/// Candidate primitive pairs, each list sorted.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CandidatePairs {
    /// `(vertex, triangle id)`.
    pub vertex_triangle: Vec<(usize, usize)>,
    /// `(edge id, edge id)` with the first id smaller.
    pub edge_edge: Vec<(usize, usize)>,
}

/// Pairs whose boxes swept from `start` to `end` (inflated by `margin`)
/// overlap. Pairs sharing a vertex or made only of fixed vertices are
/// excluded.
pub fn broad_phase(start: &[Vec3], end: &[Vec3], mesh: &CollisionMesh, margin: f64) -> CandidatePairs {
    let tri_boxes: Vec<(Vec3, Vec3)> = mesh
        .triangles
        .iter()
        .map(|t| aabb(t.iter().flat_map(|&v| [&start[v], &end[v]]), margin))
        .collect();
    let mut tri_hash = SpatialHash::new(mesh.cell_size);
    for (i, b) in tri_boxes.iter().enumerate() {
        tri_hash.insert(i as u32, &b.0, &b.1);
    }
    let vertex_triangle: Vec<(usize, usize)> = mesh
        .surface_vertices
        .par_iter()
        .map(|&v| {
            let b = aabb([&start[v], &end[v]], margin);
            let mut ids = Vec::new();
            tri_hash.query(&b.0, &b.1, &mut ids);
            ids.into_iter()
                .map(|t| t as usize)
                .filter(|&t| {
                    let tri = mesh.triangles[t];
                    !tri.contains(&v)
                        && !mesh.all_fixed([v, tri[0], tri[1], tri[2]])
                        && overlaps(&b, &tri_boxes[t])
                })
                .map(|t| (v, t))
                .collect::<Vec<_>>()
        })
        .flatten()
        .collect();

    let edge_boxes: Vec<(Vec3, Vec3)> = mesh
        .edges
        .iter()
        .map(|e| aabb(e.iter().flat_map(|&v| [&start[v], &end[v]]), margin))
        .collect();
    let mut edge_hash = SpatialHash::new(mesh.cell_size);
    for (i, b) in edge_boxes.iter().enumerate() {
        edge_hash.insert(i as u32, &b.0, &b.1);
    }
    let edge_edge: Vec<(usize, usize)> = (0..mesh.edges.len())
        .into_par_iter()
        .map(|a| {
            let ea = mesh.edges[a];
            let mut ids = Vec::new();
            edge_hash.query(&edge_boxes[a].0, &edge_boxes[a].1, &mut ids);
            ids.into_iter()
                .map(|b| b as usize)
                .filter(|&b| {
                    let eb = mesh.edges[b];
                    b > a
                        && !ea.iter().any(|v| eb.contains(v))
                        && !mesh.all_fixed([ea[0], ea[1], eb[0], eb[1]])
                        && overlaps(&edge_boxes[a], &edge_boxes[b])
                })
                .map(|b| (a, b))
                .collect::<Vec<_>>()
        })
        .flatten()
        .collect();

    CandidatePairs {
        vertex_triangle,
        edge_edge,
    }
}
