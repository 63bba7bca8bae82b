use super::Model;
use crate::contact::ContactSet;
use crate::math::Vec3;

/// Positions, velocities and per-step working buffers.
#[derive(Debug, Clone)]
pub struct SimState {
    /// Step-start positions `x^t`.
    pub x_t: Vec<Vec3>,
    /// Step-start velocities `v^t`.
    pub v_t: Vec<Vec3>,
    /// Velocities of the previous step, for the adaptive warm start.
    pub v_prev: Vec<Vec3>,
    /// Working iterate.
    pub x: Vec<Vec3>,
    /// Auxiliary buffer written during a color pass.
    pub x_new: Vec<Vec3>,
    /// Inertia target.
    pub y: Vec<Vec3>,
    pub contacts: ContactSet,
    /// Iterates `n - 1` and `n - 2` for the Chebyshev blend.
    pub x_prev: Vec<Vec3>,
    pub x_prev_prev: Vec<Vec3>,
    /// Chebyshev iteration counter and the last `omega`.
    pub cheb_n: usize,
    pub omega: f64,
    pub step_index: usize,
}

impl SimState {
    /// State at the given positions and velocities; `v_prev` starts equal to
    /// `v` so the adaptive warm start sees zero acceleration.
    pub fn new(positions: Vec<Vec3>, velocities: Vec<Vec3>) -> Self {
        assert_eq!(positions.len(), velocities.len());
        let n = positions.len();
        Self {
            x_t: positions.clone(),
            v_prev: velocities.clone(),
            v_t: velocities,
            x: positions.clone(),
            x_new: positions.clone(),
            y: positions.clone(),
            contacts: ContactSet::new(n),
            x_prev: positions.clone(),
            x_prev_prev: positions,
            cheb_n: 0,
            omega: 1.0,
            step_index: 0,
        }
    }

    /// Rest positions with zero velocity.
    pub fn at_rest(model: &Model) -> Self {
        let n = model.num_vertices();
        Self::new(model.rest_positions.clone(), vec![Vec3::zeros(); n])
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}
