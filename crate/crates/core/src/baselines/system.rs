use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SMatrix, SVector, SymmetricEigen};
use rayon::prelude::*;

use crate::contact::friction_derivatives;
use crate::materials::{snh_tet_gradient_hessian, spring_gradient_hessian};
use crate::math::{Mat3, Vec3};
use crate::solver::{ConstraintTable, Model, SimState, SolverParams};

/// Gradient of `G` and its Hessian as symmetric 3x3 blocks keyed by
/// `(row vertex, column vertex)`.
#[derive(Debug, Clone)]
pub struct GlobalSystem {
    pub gradient: DVector<f64>,
    pub blocks: BTreeMap<(usize, usize), Mat3>,
    pub num_vertices: usize,
}

impl GlobalSystem {
    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = 3 * self.num_vertices;
        let mut m = DMatrix::zeros(n, n);
        for (&(p, q), b) in &self.blocks {
            m.view_mut((3 * p, 3 * q), (3, 3)).copy_from(b);
        }
        m
    }

    pub fn block(&self, p: usize, q: usize) -> Mat3 {
        self.blocks.get(&(p, q)).copied().unwrap_or_else(Mat3::zeros)
    }

    pub fn gradient_at(&self, i: usize) -> Vec3 {
        Vec3::new(self.gradient[3 * i], self.gradient[3 * i + 1], self.gradient[3 * i + 2])
    }

    fn add(&mut self, p: usize, q: usize, b: &Mat3) {
        *self.blocks.entry((p, q)).or_insert_with(Mat3::zeros) += b;
    }

    fn add_grad(&mut self, i: usize, g: &Vec3) {
        let mut seg = self.gradient.fixed_rows_mut::<3>(3 * i);
        seg += g;
    }
}

/// Symmetrizes `m` and clamps its negative eigenvalues to zero.
pub fn project_psd<const N: usize>(m: &SMatrix<f64, N, N>) -> SMatrix<f64, N, N> {
    let d = DMatrix::from_column_slice(N, N, m.as_slice());
    let sym = (&d + d.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym.clone());
    if eig.eigenvalues.iter().all(|&l| l >= 0.0) {
        return SMatrix::from_column_slice(sym.as_slice());
    }
    let lam = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0)));
    let p = &eig.eigenvectors * lam * eig.eigenvectors.transpose();
    SMatrix::from_column_slice(p.as_slice())
}

fn scatter<const N: usize>(
    sys: &mut GlobalSystem,
    verts: &[usize],
    g: &SVector<f64, N>,
    h: &SMatrix<f64, N, N>,
) {
    for (a, &p) in verts.iter().enumerate() {
        sys.add_grad(p, &g.fixed_rows::<3>(3 * a).into_owned());
        for (b, &q) in verts.iter().enumerate() {
            sys.add(p, q, &h.fixed_view::<3, 3>(3 * a, 3 * b).into_owned());
        }
    }
}

/// Assembles `grad G` and the Hessian at `x`. Friction contributes its
/// lagged per-vertex block only. Fixed vertices get a zero gradient and an
/// identity diagonal block; subspace vertices are restricted to their span.
pub fn global_gradient_hessian(
    model: &Model,
    state: &SimState,
    params: &SolverParams,
    table: &ConstraintTable,
    x: &[Vec3],
    psd_project: bool,
) -> GlobalSystem {
    let n = x.len();
    let h2 = params.h * params.h;
    let mut sys = GlobalSystem {
        gradient: DVector::zeros(3 * n),
        blocks: BTreeMap::new(),
        num_vertices: n,
    };
    for i in 0..n {
        let m = model.masses[i] / h2;
        sys.add_grad(i, &(m * (x[i] - state.y[i])));
        sys.add(i, i, &(m * Mat3::identity()));
        if !table.boxes[i].is_empty() {
            let (_, f, hb) = table.box_derivatives(i, &x[i]);
            sys.add_grad(i, &-f);
            sys.add(i, i, &hb);
        }
    }
    let tets: Vec<_> = (0..model.tets.len())
        .into_par_iter()
        .map(|t| {
            let gh = snh_tet_gradient_hessian(
                &model.tets[t],
                x,
                &model.inv_rest_shape[t],
                model.rest_volumes[t],
                &model.tet_material[t],
            );
            let hess = if psd_project {
                project_psd(&gh.hessian)
            } else {
                gh.hessian
            };
            (gh.gradient, hess)
        })
        .collect();
    for (t, (g, hm)) in tets.iter().enumerate() {
        scatter(&mut sys, &model.tets[t], g, hm);
    }
    for s in &model.springs {
        let (_, g, hm) = spring_gradient_hessian(s, x);
        let hm = if psd_project { project_psd(&hm) } else { hm };
        scatter(&mut sys, &[s.i, s.j], &g, &hm);
    }
    let friction = params.contact.friction();
    for c in &state.contacts.contacts {
        let d = c.depth(x);
        if d > 0.0 {
            let mut g = SVector::<f64, 12>::zeros();
            let mut hm = SMatrix::<f64, 12, 12>::zeros();
            let nnt = c.normal * c.normal.transpose();
            for a in 0..4 {
                g.fixed_rows_mut::<3>(3 * a)
                    .copy_from(&(c.stiffness * d * c.coeff(a) * c.normal));
                for b in 0..4 {
                    hm.fixed_view_mut::<3, 3>(3 * a, 3 * b)
                        .copy_from(&(c.stiffness * c.coeff(a) * c.coeff(b) * nnt));
                }
            }
            scatter(&mut sys, &c.indices, &g, &hm);
        }
        if friction.mu_c > 0.0 {
            for &v in &c.indices {
                let fr = friction_derivatives(c, x, &state.x_t, &friction, params.h, v);
                sys.add_grad(v, &-fr.force);
                sys.add(v, v, &fr.hessian);
            }
        }
    }
    constrain(&mut sys, table);
    sys
}

fn constrain(sys: &mut GlobalSystem, table: &ConstraintTable) {
    let proj: Vec<Option<Mat3>> = (0..sys.num_vertices)
        .map(|i| {
            if table.fixed[i] {
                Some(Mat3::zeros())
            } else {
                table.subspace[i]
                    .as_ref()
                    .map(|(basis, _)| basis.iter().map(|b| b * b.transpose()).sum())
            }
        })
        .collect();
    if proj.iter().all(Option::is_none) {
        return;
    }
    for i in 0..sys.num_vertices {
        if let Some(p) = proj[i] {
            let g = p * sys.gradient_at(i);
            sys.gradient.fixed_rows_mut::<3>(3 * i).copy_from(&g);
        }
    }
    let keys: Vec<(usize, usize)> = sys.blocks.keys().copied().collect();
    for (p, q) in keys {
        let b = sys.blocks[&(p, q)];
        let left = proj[p].unwrap_or_else(Mat3::identity);
        let right = proj[q].unwrap_or_else(Mat3::identity);
        let mut nb = left * b * right;
        if p == q {
            if let Some(pp) = proj[p] {
                nb += Mat3::identity() - pp;
            }
        }
        sys.blocks.insert((p, q), nb);
    }
}
