//! Smoothed Coulomb friction on the tangential relative displacement of the
//! two contact points over the current step.

use nalgebra::Matrix3x2;

use super::{normal_force, Contact, FrictionParams};
use crate::materials::ElementDerivatives;
use crate::math::{Mat3, Vec3};

/// Static-to-dynamic transition: `2r - r^2` for `r = u / (eps_v h) < 1`, else 1.
pub fn friction_f1(u: f64, eps_v: f64, h: f64) -> f64 {
    let eh = eps_v * h;
    if u >= eh {
        1.0
    } else {
        let r = u / eh;
        2.0 * r - r * r
    }
}

/// Antiderivative of `friction_f1` (continuous at `u = eps_v h`).
pub fn friction_f0(u: f64, eps_v: f64, h: f64) -> f64 {
    let eh = eps_v * h;
    if u >= eh {
        u
    } else {
        u * u / eh - u * u * u / (3.0 * eh * eh) + eh / 3.0
    }
}

/// Friction for `vertex`, with the normal force recomputed from the current
/// iterate.
pub fn friction_derivatives(
    contact: &Contact,
    positions: &[Vec3],
    step_start: &[Vec3],
    params: &FrictionParams,
    h: f64,
    vertex: usize,
) -> ElementDerivatives {
    let lambda = normal_force(contact, positions);
    friction_derivatives_with_lambda(contact, positions, step_start, params, h, vertex, lambda)
}

struct Sliding {
    basis: Matrix3x2<f64>,
    u: nalgebra::Vector2<f64>,
    un: f64,
    /// `d(dx_c)/dx_i` is `s I`.
    s: f64,
}

fn sliding(contact: &Contact, positions: &[Vec3], step_start: &[Vec3], vertex: usize) -> Sliding {
    let slot = contact
        .slot_of(vertex)
        .expect("vertex does not belong to the contact");
    let mut dx = Vec3::zeros();
    for k in 0..4 {
        let v = contact.indices[k];
        dx -= contact.coeff(k) * (positions[v] - step_start[v]);
    }
    let basis = Matrix3x2::from_columns(&contact.tangent);
    let u = basis.transpose() * dx;
    Sliding {
        basis,
        u,
        un: u.norm(),
        s: -contact.coeff(slot),
    }
}

/// Friction with the normal force magnitude `lambda` held fixed; `energy`
/// is the dissipative potential `mu lambda f0(|u|)` whose gradient the force
/// is. The Hessian lags `|u|` and is positive semidefinite.
pub fn friction_derivatives_with_lambda(
    contact: &Contact,
    positions: &[Vec3],
    step_start: &[Vec3],
    params: &FrictionParams,
    h: f64,
    vertex: usize,
    lambda: f64,
) -> ElementDerivatives {
    if lambda <= 0.0 || params.mu_c == 0.0 {
        return ElementDerivatives::zero();
    }
    let sl = sliding(contact, positions, step_start, vertex);
    let scale = params.mu_c * lambda;
    let ttt = sl.basis * sl.basis.transpose();
    let energy = scale * friction_f0(sl.un, params.eps_v, h);
    if sl.un < 1e-14 {
        return ElementDerivatives {
            energy,
            force: Vec3::zeros(),
            hessian: scale * sl.s * sl.s * (2.0 / (params.eps_v * h)) * ttt,
        };
    }
    let f1 = friction_f1(sl.un, params.eps_v, h);
    ElementDerivatives {
        energy,
        force: -scale * sl.s * f1 * (sl.basis * sl.u) / sl.un,
        hessian: scale * sl.s * sl.s * (f1 / sl.un) * ttt,
    }
}

/// Exact Hessian of the dissipative potential at fixed `lambda`, including
/// the derivative through `|u|` that the solver's approximation drops.
pub fn friction_exact_hessian(
    contact: &Contact,
    positions: &[Vec3],
    step_start: &[Vec3],
    params: &FrictionParams,
    h: f64,
    vertex: usize,
    lambda: f64,
) -> Mat3 {
    let sl = sliding(contact, positions, step_start, vertex);
    let scale = params.mu_c * lambda * sl.s * sl.s;
    let eh = params.eps_v * h;
    if sl.un < 1e-14 {
        return scale * (2.0 / eh) * sl.basis * sl.basis.transpose();
    }
    let f1 = friction_f1(sl.un, params.eps_v, h);
    let df1 = if sl.un >= eh {
        0.0
    } else {
        2.0 / eh - 2.0 * sl.un / (eh * eh)
    };
    let uhat = sl.u / sl.un;
    let uut = uhat * uhat.transpose();
    let inner = df1 * uut + (f1 / sl.un) * (nalgebra::Matrix2::identity() - uut);
    scale * sl.basis * inner * sl.basis.transpose()
}
