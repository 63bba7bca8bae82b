//! Collision detection (broad phase, DCD, CCD), the quadratic penalty
//! contact energy and smoothed Coulomb friction.
//!
//! Every contact stores signed coefficients `c_k` over its four vertices so
//! that the penetration depth is `d = max(0, sum_k c_k x_k . n)`: the first
//! side (the colliding vertex, or the first edge) enters with minus its
//! barycentric weights and the second side with plus its weights.

mod broad_phase;
mod ccd;
mod dcd;
mod energy;
mod friction;
pub mod geometry;

use serde::{Deserialize, Serialize};

use crate::math::{tangent_frame, Vec3};

pub use broad_phase::{broad_phase, CandidatePairs, CollisionMesh, SpatialHash};
pub use ccd::{
    ccd_edge_edge, ccd_vertex_triangle, coplanarity_cubic, edge_edge_toi, vertex_triangle_toi,
};
pub use dcd::{dcd_vertex_triangle, detect_penetrations, recompute_dcd_anchor};
pub use energy::{contact_derivatives, contact_energy, normal_force};
pub use friction::{
    friction_derivatives, friction_derivatives_with_lambda, friction_exact_hessian, friction_f0,
    friction_f1,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ContactKind {
    VertexTriangle,
    EdgeEdge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DetectionSource {
    Dcd,
    Ccd,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Contact {
    pub kind: ContactKind,
    pub source: DetectionSource,
    /// `[vertex, t0, t1, t2]` or `[a0, a1, b0, b1]`.
    pub indices: [usize; 4],
    /// Barycentric weights of each vertex on its side of the contact.
    pub bary: [f64; 4],
    pub normal: Vec3,
    /// Columns of the 3x2 tangent basis.
    pub tangent: [Vec3; 2],
    pub stiffness: f64,
    /// Contact points `x_a`, `x_b` evaluated at the step-start positions.
    pub anchors: [Vec3; 2],
    /// Time of impact within the swept interval, 0 for DCD contacts.
    pub toi: f64,
}

impl Contact {
    pub fn new(
        kind: ContactKind,
        source: DetectionSource,
        indices: [usize; 4],
        bary: [f64; 4],
        normal: Vec3,
        stiffness: f64,
        step_start: &[Vec3],
    ) -> Self {
        let normal = normal.normalize();
        let (t, b) = tangent_frame(&normal);
        let mut c = Self {
            kind,
            source,
            indices,
            bary,
            normal,
            tangent: [t, b],
            stiffness,
            anchors: [Vec3::zeros(); 2],
            toi: 0.0,
        };
        c.anchors = c.contact_points(step_start).into();
        c
    }

    /// Number of vertices on the first (`x_a`) side.
    pub fn a_side_len(&self) -> usize {
        match self.kind {
            ContactKind::VertexTriangle => 1,
            ContactKind::EdgeEdge => 2,
        }
    }

    /// Signed coefficient `c_k` of vertex slot `k` in `x_b - x_a`.
    pub fn coeff(&self, k: usize) -> f64 {
        if k < self.a_side_len() {
            -self.bary[k]
        } else {
            self.bary[k]
        }
    }

    pub fn slot_of(&self, vertex: usize) -> Option<usize> {
        self.indices.iter().position(|&v| v == vertex)
    }

    pub fn contact_points(&self, positions: &[Vec3]) -> (Vec3, Vec3) {
        let mut xa = Vec3::zeros();
        let mut xb = Vec3::zeros();
        for k in 0..4 {
            let p = self.bary[k] * positions[self.indices[k]];
            if k < self.a_side_len() {
                xa += p;
            } else {
                xb += p;
            }
        }
        (xa, xb)
    }

    /// Signed separation along the normal, `(x_b - x_a) . n`; positive means
    /// penetration.
    pub fn signed_depth(&self, positions: &[Vec3]) -> f64 {
        let (xa, xb) = self.contact_points(positions);
        (xb - xa).dot(&self.normal)
    }

    pub fn depth(&self, positions: &[Vec3]) -> f64 {
        self.signed_depth(positions).max(0.0)
    }

    pub fn refresh_anchors(&mut self, step_start: &[Vec3]) {
        self.anchors = self.contact_points(step_start).into();
    }

    fn sort_key(&self) -> (ContactKind, [usize; 4], DetectionSource) {
        (self.kind, self.indices, self.source)
    }
}

/// Coulomb friction coefficient and the relative velocity below which the
/// smoothed static regime applies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrictionParams {
    pub mu_c: f64,
    pub eps_v: f64,
}

/// Scene-wide contact settings. A zero `k_c` disables collision handling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactParams {
    pub k_c: f64,
    pub mu_c: f64,
    pub eps_v: f64,
    pub dcd_radius: f64,
}

impl Default for ContactParams {
    fn default() -> Self {
        Self {
            k_c: 0.0,
            mu_c: 0.0,
            eps_v: 1e-2,
            dcd_radius: 0.0,
        }
    }
}

impl ContactParams {
    pub fn enabled(&self) -> bool {
        self.k_c > 0.0
    }

    pub fn friction(&self) -> FrictionParams {
        FrictionParams {
            mu_c: self.mu_c,
            eps_v: self.eps_v,
        }
    }

    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        let check = |name: &'static str, v: f64, ok: bool| {
            if ok && v.is_finite() {
                Ok(())
            } else {
                Err((name, format!("invalid value {v}")))
            }
        };
        check("k_c", self.k_c, self.k_c >= 0.0)?;
        check("mu_c", self.mu_c, self.mu_c >= 0.0)?;
        check("eps_v", self.eps_v, self.eps_v > 0.0)?;
        check("dcd_radius", self.dcd_radius, self.dcd_radius >= 0.0)
    }
}

/// Active contacts with per-vertex incidence and the sticky per-step
/// colliding flags.
#[derive(Debug, Clone, Default)]
pub struct ContactSet {
    pub contacts: Vec<Contact>,
    /// `(contact id, slot)` for every vertex.
    pub incidence: Vec<Vec<(usize, usize)>>,
    pub colliding: Vec<bool>,
}

impl ContactSet {
    pub fn new(num_vertices: usize) -> Self {
        Self {
            contacts: Vec::new(),
            incidence: vec![Vec::new(); num_vertices],
            colliding: vec![false; num_vertices],
        }
    }

    pub fn len(&self) -> usize {
        self.contacts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contacts.is_empty()
    }

    /// Drops every contact and clears the colliding flags.
    pub fn begin_step(&mut self) {
        self.contacts.clear();
        self.colliding.iter_mut().for_each(|c| *c = false);
        self.incidence.iter_mut().for_each(Vec::clear);
    }

    /// Replaces all contacts from `source` with `fresh`. Contacts that
    /// duplicate a kept contact of the other source are discarded.
    pub fn replace(&mut self, source: DetectionSource, fresh: Vec<Contact>) {
        self.contacts.retain(|c| c.source != source);
        let kept: std::collections::HashSet<(ContactKind, [usize; 4])> =
            self.contacts.iter().map(|c| (c.kind, c.indices)).collect();
        self.contacts.extend(
            fresh
                .into_iter()
                .filter(|c| !kept.contains(&(c.kind, c.indices))),
        );
        self.contacts.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        self.rebuild_incidence();
    }

    fn rebuild_incidence(&mut self) {
        self.incidence.iter_mut().for_each(Vec::clear);
        for (id, c) in self.contacts.iter().enumerate() {
            for (slot, &v) in c.indices.iter().enumerate() {
                self.incidence[v].push((id, slot));
                self.colliding[v] = true;
            }
        }
    }

    pub fn max_penetration(&self, positions: &[Vec3]) -> f64 {
        self.contacts
            .iter()
            .map(|c| c.depth(positions))
            .fold(0.0, f64::max)
    }
}
