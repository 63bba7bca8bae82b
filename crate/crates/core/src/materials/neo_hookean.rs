//! Stable Neo-Hookean energy without the logarithmic barrier:
//! `Psi(F) = mu/2 (tr(F^T F) - 3) + lambda/2 (det F - gamma)^2` with
//! `gamma = 1 + mu/lambda`, which leaves the rest shape force free.

use nalgebra::{SMatrix, SVector};

use super::{ElementDerivatives, MaterialParams};
use crate::math::{cofactor, skew, Mat3, Vec3};

/// `F = D_s * D_m^-1`.
pub fn deformation_gradient(tet: &[usize; 4], positions: &[Vec3], inv_rest_shape: &Mat3) -> Mat3 {
    crate::mesh::edge_matrix(positions, tet) * inv_rest_shape
}

/// Vectors `b_s` with `F = sum_s x_s b_s^T`: rows of `D_m^-1` for slots
/// 1..3 and minus their sum for slot 0.
pub fn shape_gradients(inv_rest_shape: &Mat3) -> [Vec3; 4] {
    let b1: Vec3 = inv_rest_shape.row(0).transpose();
    let b2: Vec3 = inv_rest_shape.row(1).transpose();
    let b3: Vec3 = inv_rest_shape.row(2).transpose();
    [-(b1 + b2 + b3), b1, b2, b3]
}

pub fn snh_energy_density(f: &Mat3, params: &MaterialParams) -> f64 {
    let gamma = 1.0 + params.mu / params.lambda;
    let j = f.determinant();
    0.5 * params.mu * (f.norm_squared() - 3.0) + 0.5 * params.lambda * (j - gamma).powi(2)
}

pub fn snh_energy(
    tet: &[usize; 4],
    positions: &[Vec3],
    inv_rest_shape: &Mat3,
    rest_volume: f64,
    params: &MaterialParams,
) -> f64 {
    rest_volume * snh_energy_density(&deformation_gradient(tet, positions, inv_rest_shape), params)
}

/// Energy, force and diagonal Hessian block for the vertex in `slot`.
///
/// The block is exact. A rank-one change `x_s + d` perturbs `F` by `d b_s^T`,
/// along which `det F` is affine, so the second derivative of the volume term
/// reduces to `lambda g g^T` with `g = cof(F) b_s`.
pub fn snh_derivatives(
    tet: &[usize; 4],
    positions: &[Vec3],
    inv_rest_shape: &Mat3,
    rest_volume: f64,
    params: &MaterialParams,
    slot: usize,
) -> ElementDerivatives {
    let f = deformation_gradient(tet, positions, inv_rest_shape);
    let gamma = 1.0 + params.mu / params.lambda;
    let j = f.determinant();
    let cof = cofactor(&f);
    let pk1 = params.mu * f + params.lambda * (j - gamma) * cof;
    let b = shape_gradients(inv_rest_shape)[slot];
    let g = cof * b;
    ElementDerivatives {
        energy: rest_volume * snh_energy_density(&f, params),
        force: -rest_volume * (pk1 * b),
        hessian: rest_volume
            * (params.mu * b.norm_squared() * Mat3::identity() + params.lambda * g * g.transpose()),
    }
}

/// Full 12-dof gradient and Hessian of one tet, slot-major (`3 * slot + axis`).
#[derive(Debug, Clone)]
pub struct TetGradHess {
    pub energy: f64,
    pub gradient: SVector<f64, 12>,
    pub hessian: SMatrix<f64, 12, 12>,
}

pub fn snh_tet_gradient_hessian(
    tet: &[usize; 4],
    positions: &[Vec3],
    inv_rest_shape: &Mat3,
    rest_volume: f64,
    params: &MaterialParams,
) -> TetGradHess {
    let f = deformation_gradient(tet, positions, inv_rest_shape);
    let gamma = 1.0 + params.mu / params.lambda;
    let j = f.determinant();
    let cof = cofactor(&f);
    let pk1 = params.mu * f + params.lambda * (j - gamma) * cof;
    let b = shape_gradients(inv_rest_shape);
    let cols = [
        f.column(0).into_owned(),
        f.column(1).into_owned(),
        f.column(2).into_owned(),
    ];
    // d2 det / (d f_i d f_j) as a bilinear form on columns: -[f_k]x for cyclic (i, j, k).
    let mut det_hess = [[Mat3::zeros(); 3]; 3];
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        det_hess[i][j] = -skew(&cols[k]);
        det_hess[j][i] = skew(&cols[k]);
    }
    let g: Vec<Vec3> = b.iter().map(|bs| cof * bs).collect();

    let mut gradient = SVector::<f64, 12>::zeros();
    let mut hessian = SMatrix::<f64, 12, 12>::zeros();
    for s in 0..4 {
        gradient
            .fixed_rows_mut::<3>(3 * s)
            .copy_from(&(rest_volume * (pk1 * b[s])));
        for t in 0..4 {
            let mut block = params.mu * b[s].dot(&b[t]) * Mat3::identity()
                + params.lambda * g[s] * g[t].transpose();
            let mut second = Mat3::zeros();
            for i in 0..3 {
                for jj in 0..3 {
                    if i != jj {
                        second += b[s][i] * b[t][jj] * det_hess[i][jj];
                    }
                }
            }
            block += params.lambda * (j - gamma) * second;
            hessian
                .fixed_view_mut::<3, 3>(3 * s, 3 * t)
                .copy_from(&(rest_volume * block));
        }
    }
    TetGradHess {
        energy: rest_volume * snh_energy_density(&f, params),
        gradient,
        hessian,
    }
}
