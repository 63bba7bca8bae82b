use rayon::prelude::*;

use super::{vertex_system, ConstraintTable, Model, SimState, SolverParams};
use crate::contact::{contact_energy, friction_derivatives};
use crate::materials::{snh_energy, spring_energy};
use crate::math::Vec3;

/// Global variational energy `G(x)`: inertia potential of the free vertices,
/// elastic and spring energies, box penalties, contact penalties and the
/// friction dissipation potential of the current contact set.
pub fn variational_energy(
    model: &Model,
    state: &SimState,
    params: &SolverParams,
    table: &ConstraintTable,
    x: &[Vec3],
) -> f64 {
    let h2 = params.h * params.h;
    let per_vertex: Vec<f64> = (0..x.len())
        .into_par_iter()
        .map(|i| {
            let mut e = table.box_derivatives(i, &x[i]).0;
            if !table.fixed[i] {
                e += 0.5 * model.masses[i] / h2 * (x[i] - state.y[i]).norm_squared();
            }
            e
        })
        .collect();
    let per_tet: Vec<f64> = (0..model.tets.len())
        .into_par_iter()
        .map(|t| {
            snh_energy(
                &model.tets[t],
                x,
                &model.inv_rest_shape[t],
                model.rest_volumes[t],
                &model.tet_material[t],
            )
        })
        .collect();
    let springs: f64 = model.springs.iter().map(|s| spring_energy(s, x)).sum();
    let friction = params.contact.friction();
    let contacts: f64 = state
        .contacts
        .contacts
        .iter()
        .map(|c| {
            let mut e = contact_energy(c, x);
            if friction.mu_c > 0.0 {
                // The dissipation potential is shared by all four vertices.
                e += friction_derivatives(c, x, &state.x_t, &friction, params.h, c.indices[0]).energy;
            }
            e
        })
        .sum();
    per_vertex.iter().sum::<f64>() + per_tet.iter().sum::<f64>() + springs + contacts
}

/// `dG/dx_i` at `x`, zero for fixed vertices. Damping is not part of `G`.
pub fn vertex_gradient(
    model: &Model,
    state: &SimState,
    params: &SolverParams,
    table: &ConstraintTable,
    i: usize,
    x: &[Vec3],
) -> Vec3 {
    if table.fixed[i] {
        return Vec3::zeros();
    }
    let sys = vertex_system(model, state, params, table, i, x);
    let g = -sys.force - sys.damping * (x[i] - state.x_t[i]);
    match &table.subspace[i] {
        Some((basis, _)) => basis.iter().map(|b| b * b.dot(&g)).sum(),
        None => g,
    }
}
