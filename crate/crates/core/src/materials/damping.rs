use crate::math::{Mat3, Vec3};

/// Rayleigh damping contribution for one vertex: `(k_d / h) K` is added to
/// the local Hessian and `-(k_d / h) K (x - x_t)` to the local force, with the
/// velocity expressed as the position change over the step.
pub fn damping_terms(stiffness: &Mat3, x: &Vec3, x_step_start: &Vec3, k_d: f64, h: f64) -> (Vec3, Mat3) {
    debug_assert!(h > 0.0);
    if k_d == 0.0 {
        return (Vec3::zeros(), Mat3::zeros());
    }
    let hess = (k_d / h) * stiffness;
    (-(hess * (x - x_step_start)), hess)
}
