use std::ops::Range;

use super::ConstraintTable;
use crate::contact::CollisionMesh;
use crate::materials::MaterialParams;
use crate::math::{Mat3, Vec3};
use crate::mesh::{degree_order, greedy_color, ColorPartition, Spring, SpringNet, TetMesh, VertexAdjacency};

/// Index ranges of one body inside the merged model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BodyRange {
    pub vertices: Range<usize>,
    pub tets: Range<usize>,
    pub springs: Range<usize>,
}

/// All bodies of a scene merged into global arrays. Element ids in
/// `adjacency` number tets first, then springs.
#[derive(Debug, Clone)]
pub struct Model {
    pub rest_positions: Vec<Vec3>,
    pub masses: Vec<f64>,
    pub tets: Vec<[usize; 4]>,
    pub rest_volumes: Vec<f64>,
    pub inv_rest_shape: Vec<Mat3>,
    pub tet_material: Vec<MaterialParams>,
    pub springs: Vec<Spring>,
    pub spring_damping: Vec<f64>,
    pub surface_tris: Vec<[usize; 3]>,
    pub surface_edges: Vec<[usize; 2]>,
    pub vertex_body: Vec<usize>,
    pub bodies: Vec<BodyRange>,
    pub adjacency: VertexAdjacency,
    pub coloring: ColorPartition,
    pub collision: CollisionMesh,
}

impl Model {
    pub fn num_vertices(&self) -> usize {
        self.rest_positions.len()
    }

    pub fn num_tets(&self) -> usize {
        self.tets.len()
    }

    /// Vertex ids of element `e` in adjacency numbering.
    pub fn element_vertices(&self, e: usize) -> Vec<usize> {
        if e < self.tets.len() {
            self.tets[e].to_vec()
        } else {
            let s = &self.springs[e - self.tets.len()];
            vec![s.i, s.j]
        }
    }

    /// Marks fixed vertices in the collision mesh so that pairs made only of
    /// fixed vertices are never tested.
    pub fn apply_constraints(&mut self, table: &ConstraintTable) {
        self.collision.fixed = table.fixed.clone();
    }

    pub fn body_mass(&self, body: usize) -> f64 {
        self.masses[self.bodies[body].vertices.clone()].iter().sum()
    }

    /// Mass-weighted center of a body at `positions`.
    pub fn body_center(&self, body: usize, positions: &[Vec3]) -> Vec3 {
        let r = self.bodies[body].vertices.clone();
        let m: f64 = self.masses[r.clone()].iter().sum();
        r.map(|v| self.masses[v] * positions[v]).sum::<Vec3>() / m
    }

    /// Sum of signed tet volumes of a body at `positions`.
    pub fn body_volume(&self, body: usize, positions: &[Vec3]) -> f64 {
        self.tets[self.bodies[body].tets.clone()]
            .iter()
            .map(|t| crate::mesh::edge_matrix(positions, t).determinant() / 6.0)
            .sum()
    }
}

#[derive(Debug, Clone, Default)]
pub struct ModelBuilder {
    rest_positions: Vec<Vec3>,
    masses: Vec<f64>,
    tets: Vec<[usize; 4]>,
    rest_volumes: Vec<f64>,
    inv_rest_shape: Vec<Mat3>,
    tet_material: Vec<MaterialParams>,
    springs: Vec<Spring>,
    spring_damping: Vec<f64>,
    surface_tris: Vec<[usize; 3]>,
    surface_edges: Vec<[usize; 2]>,
    vertex_body: Vec<usize>,
    bodies: Vec<BodyRange>,
}

impl ModelBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn begin_body(&self) -> (usize, usize, usize) {
        (self.rest_positions.len(), self.tets.len(), self.springs.len())
    }

    fn end_body(&mut self, (v0, t0, s0): (usize, usize, usize)) -> usize {
        let id = self.bodies.len();
        let v1 = self.rest_positions.len();
        self.vertex_body.resize(v1, id);
        self.bodies.push(BodyRange {
            vertices: v0..v1,
            tets: t0..self.tets.len(),
            springs: s0..self.springs.len(),
        });
        id
    }

    /// Appends a tet mesh; returns its body id.
    pub fn add_tet_mesh(&mut self, mesh: &TetMesh, material: MaterialParams) -> usize {
        let start = self.begin_body();
        let off = start.0;
        self.rest_positions.extend_from_slice(&mesh.rest_positions);
        self.masses.extend_from_slice(&mesh.masses);
        self.tets.extend(mesh.tets.iter().map(|t| t.map(|v| v + off)));
        self.rest_volumes.extend_from_slice(&mesh.rest_volumes);
        self.inv_rest_shape.extend_from_slice(&mesh.inv_rest_shape);
        self.tet_material.extend(std::iter::repeat(material).take(mesh.tets.len()));
        self.surface_tris.extend(mesh.surface_tris.iter().map(|t| t.map(|v| v + off)));
        self.surface_edges.extend(mesh.surface_edges.iter().map(|e| e.map(|v| v + off)));
        self.end_body(start)
    }

    /// Appends a spring network; its particles do not collide.
    pub fn add_spring_net(&mut self, net: &SpringNet) -> usize {
        let start = self.begin_body();
        let off = start.0;
        self.rest_positions.extend_from_slice(&net.particles);
        self.masses.extend_from_slice(&net.masses);
        self.springs.extend(net.springs.iter().map(|s| Spring {
            i: s.i + off,
            j: s.j + off,
            ..*s
        }));
        self.spring_damping
            .extend(std::iter::repeat(net.damping).take(net.springs.len()));
        self.end_body(start)
    }

    pub fn build(self) -> Model {
        let n = self.rest_positions.len();
        let mut adjacency = VertexAdjacency::build(n, self.tets.iter());
        adjacency.extend(self.tets.len(), self.springs.iter().map(|s| [s.i, s.j]));
        let coloring = greedy_color(&adjacency, &degree_order(&adjacency));
        let collision = CollisionMesh::new(
            self.surface_tris.clone(),
            self.surface_edges.clone(),
            self.tets.clone(),
            self.vertex_body.clone(),
            vec![false; n],
            &self.rest_positions,
        );
        Model {
            rest_positions: self.rest_positions,
            masses: self.masses,
            tets: self.tets,
            rest_volumes: self.rest_volumes,
            inv_rest_shape: self.inv_rest_shape,
            tet_material: self.tet_material,
            springs: self.springs,
            spring_damping: self.spring_damping,
            surface_tris: self.surface_tris,
            surface_edges: self.surface_edges,
            vertex_body: self.vertex_body,
            bodies: self.bodies,
            adjacency,
            coloring,
            collision,
        }
    }
}
