//! The VBD time stepper: inertia target, warm start, color-ordered local
//! Newton solves on single vertices, Chebyshev blending and the velocity
//! update.

mod constraints;
mod energy;
mod local;
mod model;
mod state;
mod step;

use serde::{Deserialize, Serialize};

use crate::contact::ContactParams;
use crate::math::Vec3;

pub use constraints::{Constraint, ConstraintKind, ConstraintTable};
pub use energy::{variational_energy, vertex_gradient};
pub use local::{local_solve, vertex_system, LocalSystem};
pub use model::{BodyRange, Model, ModelBuilder};
pub use state::SimState;
pub use step::{
    accelerate, begin_step, chebyshev_omega, color_pass, end_step, inertia_target, initialize,
    iterate, step, step_observed, with_threads, IterationInfo, StepStats,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LineSearch {
    #[default]
    Off,
    LocalBacktracking,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InitMode {
    PrevPos,
    Inertia,
    InertiaAccel,
    #[default]
    Adaptive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams {
    pub h: f64,
    pub substeps: usize,
    pub n_max: usize,
    pub n_col: usize,
    pub rho: f64,
    pub eps_det: f64,
    pub line_search: LineSearch,
    pub init_mode: InitMode,
    pub a_ext: Vec3,
    pub contact: ContactParams,
    /// Keeps the Chebyshev iteration counter running across steps instead
    /// of restarting at `omega_1` every step.
    pub persist_acceleration: bool,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            h: 1.0 / 60.0,
            substeps: 1,
            n_max: 10,
            n_col: 1,
            rho: 0.0,
            eps_det: 1e-10,
            line_search: LineSearch::Off,
            init_mode: InitMode::Adaptive,
            a_ext: Vec3::new(0.0, -9.8, 0.0),
            contact: ContactParams::default(),
            persist_acceleration: false,
        }
    }
}

impl SolverParams {
    /// Checks the parameter invariants; the error names the offending field.
    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(("h", format!("must be positive, got {}", self.h)));
        }
        if self.substeps < 1 {
            return Err(("S", "must be at least 1".into()));
        }
        if self.n_max < 1 {
            return Err(("n_max", "must be at least 1".into()));
        }
        if self.n_col < 1 || self.n_col > self.n_max {
            return Err(("n_col", format!("must lie in [1, n_max = {}]", self.n_max)));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(("rho", format!("must lie in [0, 1), got {}", self.rho)));
        }
        if !(self.eps_det >= 0.0 && self.eps_det.is_finite()) {
            return Err(("eps_det", format!("must be non-negative, got {}", self.eps_det)));
        }
        if !crate::math::is_finite3(&self.a_ext) {
            return Err(("gravity", "must be finite".into()));
        }
        self.contact.validate().map_err(|(k, m)| (k, m))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error("non-finite state at step {step}, iteration {iteration}, vertex {vertex}")]
    NonFiniteState {
        step: usize,
        iteration: usize,
        vertex: usize,
    },
}
