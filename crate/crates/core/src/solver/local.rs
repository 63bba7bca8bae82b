use nalgebra::{Matrix2, Vector2};

use super::{ConstraintTable, LineSearch, Model, SimState, SolverError, SolverParams};
use crate::contact::{
    contact_derivatives, friction_derivatives, friction_f0, normal_force, Contact,
};
use crate::materials::{damping_terms, snh_derivatives, snh_energy, spring_derivatives, spring_energy};
use crate::math::{inverse3, is_finite3, Mat3, Vec3};
use crate::mesh::Spring;

/// Force `f_i` and Hessian `H_i` of one vertex's local variational energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalSystem {
    pub force: Vec3,
    pub hessian: Mat3,
    /// Sum of the damping Hessians `(k_d / h) K`, kept so the local energy can
    /// include the matching quadratic term.
    pub damping: Mat3,
}

/// Assembles the local system of vertex `i` at positions `x`.
pub fn vertex_system(
    model: &Model,
    state: &SimState,
    params: &SolverParams,
    table: &ConstraintTable,
    i: usize,
    x: &[Vec3],
) -> LocalSystem {
    let h = params.h;
    let m_h2 = model.masses[i] / (h * h);
    let mut force = -m_h2 * (x[i] - state.y[i]);
    let mut hessian = m_h2 * Mat3::identity();
    let mut damping = Mat3::zeros();
    let nt = model.tets.len();
    for inc in &model.adjacency.elements[i] {
        let (d, k_d) = if inc.element < nt {
            let t = inc.element;
            let mat = &model.tet_material[t];
            let d = snh_derivatives(
                &model.tets[t],
                x,
                &model.inv_rest_shape[t],
                model.rest_volumes[t],
                mat,
                inc.slot,
            );
            (d, mat.k_d)
        } else {
            let s = inc.element - nt;
            (
                spring_derivatives(&model.springs[s], x, inc.slot),
                model.spring_damping[s],
            )
        };
        force += d.force;
        hessian += d.hessian;
        if k_d > 0.0 {
            let (fd, hd) = damping_terms(&d.hessian, &x[i], &state.x_t[i], k_d, h);
            force += fd;
            hessian += hd;
            damping += hd;
        }
    }
    let friction = params.contact.friction();
    for &(cid, _) in &state.contacts.incidence[i] {
        let c = &state.contacts.contacts[cid];
        let d = contact_derivatives(c, x, i);
        force += d.force;
        hessian += d.hessian;
        if friction.mu_c > 0.0 {
            let fr = friction_derivatives(c, x, &state.x_t, &friction, h, i);
            force += fr.force;
            hessian += fr.hessian;
        }
    }
    if !table.boxes[i].is_empty() {
        let (_, f, hb) = table.box_derivatives(i, &x[i]);
        force += f;
        hessian += hb;
    }
    LocalSystem {
        force,
        hessian,
        damping,
    }
}

/// `G_i` with vertex `i` moved to `xi`, everything else read from `x`.
/// Contact normal forces used by friction are those at `x`.
fn local_energy(
    model: &Model,
    state: &SimState,
    params: &SolverParams,
    table: &ConstraintTable,
    i: usize,
    x: &[Vec3],
    sys: &LocalSystem,
    xi: &Vec3,
) -> f64 {
    let h = params.h;
    let at = |v: usize| if v == i { *xi } else { x[v] };
    let mut e = 0.5 * model.masses[i] / (h * h) * (xi - state.y[i]).norm_squared();
    let nt = model.tets.len();
    for inc in &model.adjacency.elements[i] {
        if inc.element < nt {
            let t = inc.element;
            let local = model.tets[t].map(at);
            e += snh_energy(
                &[0, 1, 2, 3],
                &local,
                &model.inv_rest_shape[t],
                model.rest_volumes[t],
                &model.tet_material[t],
            );
        } else {
            let s = &model.springs[inc.element - nt];
            let local = [at(s.i), at(s.j)];
            e += spring_energy(&Spring { i: 0, j: 1, ..*s }, &local);
        }
    }
    let dv = xi - state.x_t[i];
    e += 0.5 * dv.dot(&(sys.damping * dv));
    let friction = params.contact.friction();
    for &(cid, _) in &state.contacts.incidence[i] {
        let c: &Contact = &state.contacts.contacts[cid];
        let mut sep = 0.0;
        let mut slide = Vec3::zeros();
        for k in 0..4 {
            let v = c.indices[k];
            sep += c.coeff(k) * at(v).dot(&c.normal);
            slide -= c.coeff(k) * (at(v) - state.x_t[v]);
        }
        let d = sep.max(0.0);
        e += 0.5 * c.stiffness * d * d;
        if friction.mu_c > 0.0 {
            let lambda = normal_force(c, x);
            if lambda > 0.0 {
                let u = Vector2::new(c.tangent[0].dot(&slide), c.tangent[1].dot(&slide));
                e += friction.mu_c * lambda * friction_f0(u.norm(), friction.eps_v, h);
            }
        }
    }
    e + table.box_derivatives(i, xi).0
}

fn solve_block(sys: &LocalSystem, eps_det: f64, basis: Option<&[Vec3]>) -> Vec3 {
    let (f, hm) = (&sys.force, &sys.hessian);
    match basis {
        None => {
            let det = hm.determinant();
            let scale = (hm.trace() / 3.0).powi(3).abs();
            if !(det.abs() > eps_det * scale) {
                return Vec3::zeros();
            }
            inverse3(hm).map_or(Vec3::zeros(), |inv| inv * f)
        }
        Some([b]) => {
            let hr = b.dot(&(hm * b));
            if hr == 0.0 || !hr.is_finite() {
                return Vec3::zeros();
            }
            b * (b.dot(f) / hr)
        }
        Some([b0, b1]) => {
            let hr = Matrix2::new(
                b0.dot(&(hm * b0)),
                b0.dot(&(hm * b1)),
                b1.dot(&(hm * b0)),
                b1.dot(&(hm * b1)),
            );
            let det = hr.determinant();
            if !(det.abs() > eps_det * (hr.trace() / 2.0).powi(2)) {
                return Vec3::zeros();
            }
            let r = hr.try_inverse().map_or(Vector2::zeros(), |inv| {
                inv * Vector2::new(b0.dot(f), b1.dot(f))
            });
            b0 * r.x + b1 * r.y
        }
        Some(_) => Vec3::zeros(),
    }
}

/// One local Newton step for vertex `i` reading `state.x`. Fixed vertices
/// return zero.
pub fn local_solve(
    model: &Model,
    state: &SimState,
    params: &SolverParams,
    table: &ConstraintTable,
    i: usize,
) -> Result<Vec3, SolverError> {
    let non_finite = || SolverError::NonFiniteState {
        step: state.step_index,
        iteration: 0,
        vertex: i,
    };
    if !is_finite3(&state.x[i]) {
        return Err(non_finite());
    }
    if table.fixed[i] {
        return Ok(Vec3::zeros());
    }
    let x = &state.x;
    let sys = vertex_system(model, state, params, table, i, x);
    let basis = table.subspace[i].as_ref().map(|(b, _)| b.as_slice());
    let mut dx = solve_block(&sys, params.eps_det, basis);
    if !is_finite3(&dx) {
        return Err(non_finite());
    }
    if params.line_search == LineSearch::LocalBacktracking && dx != Vec3::zeros() {
        let g0 = local_energy(model, state, params, table, i, x, &sys, &x[i]);
        let mut accepted = false;
        for _ in 0..=16 {
            let g = local_energy(model, state, params, table, i, x, &sys, &(x[i] + dx));
            if g <= g0 {
                accepted = true;
                break;
            }
            dx *= 0.5;
        }
        if !accepted {
            dx = Vec3::zeros();
        }
    }
    Ok(dx)
}
