use serde::{Deserialize, Serialize};

use super::{MeshError, VertexAdjacency};
use crate::math::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spring {
    pub i: usize,
    pub j: usize,
    pub rest_length: f64,
    pub stiffness: f64,
}

/// Particles joined by linear springs.
#[derive(Debug, Clone)]
pub struct SpringNet {
    pub particles: Vec<Vec3>,
    pub springs: Vec<Spring>,
    pub masses: Vec<f64>,
    /// Rayleigh damping coefficient applied to every spring (seconds).
    pub damping: f64,
}

impl SpringNet {
    pub fn new(
        particles: Vec<Vec3>,
        springs: Vec<Spring>,
        masses: Vec<f64>,
    ) -> Result<Self, MeshError> {
        let n = particles.len();
        assert_eq!(masses.len(), n, "one mass per particle");
        for (s, sp) in springs.iter().enumerate() {
            for index in [sp.i, sp.j] {
                if index >= n {
                    return Err(MeshError::IndexOutOfRange {
                        element: s,
                        index,
                        count: n,
                    });
                }
            }
            let reason = if sp.i == sp.j {
                Some("both ends on the same particle")
            } else if !(sp.rest_length > 0.0 && sp.rest_length.is_finite()) {
                Some("rest length must be positive")
            } else if !(sp.stiffness >= 0.0 && sp.stiffness.is_finite()) {
                Some("stiffness must be non-negative")
            } else {
                None
            };
            if let Some(reason) = reason {
                return Err(MeshError::InvalidSpring {
                    spring: s,
                    reason: reason.to_string(),
                });
            }
        }
        if let Some(i) = masses.iter().position(|&m| !(m > 0.0 && m.is_finite())) {
            return Err(MeshError::OrphanVertex(i));
        }
        Ok(Self {
            particles,
            springs,
            masses,
            damping: 0.0,
        })
    }

    pub fn num_particles(&self) -> usize {
        self.particles.len()
    }

    pub fn incidence(&self) -> VertexAdjacency {
        VertexAdjacency::build(
            self.num_particles(),
            self.springs.iter().map(|s| [s.i, s.j]),
        )
    }

    /// Strain `(l - l0) / l0` of every spring at `positions`.
    pub fn strains(&self, positions: &[Vec3]) -> Vec<f64> {
        self.springs
            .iter()
            .map(|s| ((positions[s.i] - positions[s.j]).norm() - s.rest_length) / s.rest_length)
            .collect()
    }
}
