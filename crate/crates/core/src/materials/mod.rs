//! Per-element energies with exact per-vertex gradients and 3x3 Hessian
//! blocks, plus the Rayleigh damping terms added to a vertex's local system.

mod damping;
mod neo_hookean;
mod spring;

use serde::{Deserialize, Serialize};

use crate::math::{Mat3, Vec3};

pub use damping::damping_terms;
pub use neo_hookean::{
    deformation_gradient, shape_gradients, snh_derivatives, snh_energy, snh_energy_density,
    snh_tet_gradient_hessian, TetGradHess,
};
pub use spring::{spring_derivatives, spring_energy, spring_gradient_hessian};

/// Lamé parameters and damping coefficient of a hyperelastic material.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialParams {
    pub mu: f64,
    pub lambda: f64,
    #[serde(default)]
    pub k_d: f64,
}

impl MaterialParams {
    pub fn new(mu: f64, lambda: f64, k_d: f64) -> Self {
        Self { mu, lambda, k_d }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(format!("mu must be positive, got {}", self.mu));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(format!("lambda must be positive, got {}", self.lambda));
        }
        if !(self.k_d >= 0.0 && self.k_d.is_finite()) {
            return Err(format!("k_d must be non-negative, got {}", self.k_d));
        }
        Ok(())
    }
}

/// Energy of one force element together with the force on, and Hessian
/// block of, one of its vertices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementDerivatives {
    pub energy: f64,
    pub force: Vec3,
    pub hessian: Mat3,
}

impl ElementDerivatives {
    pub fn zero() -> Self {
        Self {
            energy: 0.0,
            force: Vec3::zeros(),
            hessian: Mat3::zeros(),
        }
    }
}
