use nalgebra::{SMatrix, SVector};

use super::ElementDerivatives;
use crate::math::{Mat3, Vec3};
use crate::mesh::Spring;

pub fn spring_energy(spring: &Spring, positions: &[Vec3]) -> f64 {
    let l = (positions[spring.i] - positions[spring.j]).norm();
    0.5 * spring.stiffness * (l - spring.rest_length).powi(2)
}

/// Gradient (w.r.t. endpoint `i`) and the `ii` Hessian block, or `None` when
/// the endpoints coincide and the direction is undefined.
fn grad_and_block(spring: &Spring, positions: &[Vec3]) -> Option<(f64, Vec3, Mat3)> {
    let d = positions[spring.i] - positions[spring.j];
    let l = d.norm();
    if l < 1e-12 * spring.rest_length {
        return None;
    }
    let k = spring.stiffness;
    let u = d / l;
    let stretch = l - spring.rest_length;
    let uut = u * u.transpose();
    let block = k * (uut + (stretch / l) * (Mat3::identity() - uut));
    Some((0.5 * k * stretch * stretch, k * stretch * u, block))
}

/// `endpoint` is 0 for `spring.i` and 1 for `spring.j`.
pub fn spring_derivatives(spring: &Spring, positions: &[Vec3], endpoint: usize) -> ElementDerivatives {
    match grad_and_block(spring, positions) {
        Some((energy, grad_i, block)) => {
            let sign = if endpoint == 0 { 1.0 } else { -1.0 };
            ElementDerivatives {
                energy,
                force: -sign * grad_i,
                hessian: block,
            }
        }
        None => ElementDerivatives {
            energy: spring_energy(spring, positions),
            force: Vec3::zeros(),
            hessian: spring.stiffness * Mat3::identity(),
        },
    }
}

/// Full 6-dof gradient and Hessian, ordered `[i, j]`.
pub fn spring_gradient_hessian(
    spring: &Spring,
    positions: &[Vec3],
) -> (f64, SVector<f64, 6>, SMatrix<f64, 6, 6>) {
    let (energy, grad_i, block) = grad_and_block(spring, positions).unwrap_or((
        spring_energy(spring, positions),
        Vec3::zeros(),
        spring.stiffness * Mat3::identity(),
    ));
    let mut g = SVector::<f64, 6>::zeros();
    g.fixed_rows_mut::<3>(0).copy_from(&grad_i);
    g.fixed_rows_mut::<3>(3).copy_from(&-grad_i);
    let mut h = SMatrix::<f64, 6, 6>::zeros();
    h.fixed_view_mut::<3, 3>(0, 0).copy_from(&block);
    h.fixed_view_mut::<3, 3>(3, 3).copy_from(&block);
    h.fixed_view_mut::<3, 3>(0, 3).copy_from(&-block);
    h.fixed_view_mut::<3, 3>(3, 0).copy_from(&-block);
    (energy, g, h)
}
