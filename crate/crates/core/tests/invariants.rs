use nalgebra::{Rotation3, SMatrix, Unit};
use proptest::prelude::*;

use vbd::baselines::project_psd;
use vbd::contact::{friction_f0, friction_f1};
use vbd::harness::{bin_bytes, generate_beam, parse_bin};
use vbd::materials::{snh_energy, snh_tet_gradient_hessian, MaterialParams};
use vbd::math::{Mat3, Vec3};
use vbd::mesh::{degree_order, edge_matrix, greedy_color, VertexAdjacency};
use vbd::solver::chebyshev_omega;

fn vec3(range: f64) -> impl Strategy<Value = Vec3> {
    prop::array::uniform3(-range..range).prop_map(Vec3::from)
}

fn unit_tet() -> ([usize; 4], Vec<Vec3>, Mat3, f64) {
    let rest = vec![Vec3::zeros(), Vec3::x(), Vec3::y(), Vec3::z()];
    let tet = [0, 1, 2, 3];
    let dm = edge_matrix(&rest, &tet);
    (tet, rest.clone(), dm.try_inverse().unwrap(), dm.determinant() / 6.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coloring_separates_neighbors(nx in 2usize..6, ny in 2usize..5, nz in 2usize..5) {
        let (p, tets) = generate_beam(nx, ny, nz, 0.1);
        let adj = VertexAdjacency::build(p.len(), tets.iter());
        let coloring = greedy_color(&adj, &degree_order(&adj));
        prop_assert!(coloring.is_valid_for(&tets));
        prop_assert!(coloring.num_colors <= adj.max_degree() + 1);
        prop_assert_eq!(coloring.group_sizes().iter().sum::<usize>(), p.len());
    }

    #[test]
    fn chebyshev_weights_stay_in_range(rho in 0.0f64..0.999, n in 1usize..200) {
        let w = chebyshev_omega(rho, n);
        prop_assert!((1.0..2.0).contains(&w));
        // From n = 2 on the weights decrease towards 2 / (1 + sqrt(1 - rho^2)).
        let limit = 2.0 / (1.0 + (1.0 - rho * rho).sqrt());
        if n >= 2 {
            prop_assert!(w >= limit - 1e-12);
        }
        if n >= 3 {
            prop_assert!(w <= chebyshev_omega(rho, n - 1) + 1e-15);
        }
    }

    #[test]
    fn neo_hookean_is_invariant_under_rigid_motion(
        axis in vec3(1.0).prop_filter("nonzero axis", |a| a.norm() > 1e-3),
        angle in -3.1f64..3.1,
        shift in vec3(5.0),
        deform in prop::array::uniform9(-0.2f64..0.2),
    ) {
        let (tet, rest, inv, vol) = unit_tet();
        let params = MaterialParams::new(1e5, 1e6, 0.0);
        let f = Mat3::identity() + Mat3::from_row_slice(&deform);
        let x: Vec<Vec3> = rest.iter().map(|p| f * p).collect();
        let rot = Rotation3::from_axis_angle(&Unit::new_normalize(axis), angle);
        let moved: Vec<Vec3> = x.iter().map(|p| rot * p + shift).collect();
        let e0 = snh_energy(&tet, &x, &inv, vol, &params);
        let e1 = snh_energy(&tet, &moved, &inv, vol, &params);
        prop_assert!((e0 - e1).abs() <= 1e-9 * e0.abs().max(1.0));
        // Net force of an element is zero.
        let g = snh_tet_gradient_hessian(&tet, &moved, &inv, vol, &params).gradient;
        let net: Vec3 = (0..4).map(|s| g.fixed_rows::<3>(3 * s).into_owned()).sum();
        prop_assert!(net.norm() <= 1e-8 * g.norm().max(1.0));
    }

    #[test]
    fn rest_shape_is_stress_free(scale in 0.01f64..10.0, mu in 1e3f64..1e7, ratio in 1.0f64..100.0) {
        let (tet, rest, _, _) = unit_tet();
        let x: Vec<Vec3> = rest.iter().map(|p| p * scale).collect();
        let dm = edge_matrix(&x, &tet);
        let params = MaterialParams::new(mu, mu * ratio, 0.0);
        let gh = snh_tet_gradient_hessian(&tet, &x, &dm.try_inverse().unwrap(), dm.determinant() / 6.0, &params);
        prop_assert!(gh.gradient.norm() <= 1e-9 * mu * scale * scale);
        // The stable energy keeps a constant offset at rest.
        let offset = scale.powi(3) / 6.0 * 0.5 * mu * mu / params.lambda;
        prop_assert!((gh.energy - offset).abs() <= 1e-9 * offset);
    }

    #[test]
    fn friction_ramp_is_bounded_and_monotone(u in 0.0f64..1.0, du in 0.0f64..1.0, eps in 1e-4f64..1.0, h in 1e-3f64..0.1) {
        let a = friction_f1(u, eps, h);
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(friction_f1(u + du, eps, h) >= a);
        prop_assert!(friction_f0(u + du, eps, h) >= friction_f0(u, eps, h));
    }

    #[test]
    fn psd_projection_clamps_negative_eigenvalues(entries in prop::array::uniform32(-10.0f64..10.0)) {
        let m = SMatrix::<f64, 6, 6>::from_fn(|i, j| entries[(i * 6 + j) % 32] * if i <= j { 1.0 } else { -0.5 });
        let p = project_psd(&m);
        prop_assert!((p - p.transpose()).norm() <= 1e-9 * p.norm().max(1.0));
        let eig = p.symmetric_eigenvalues();
        prop_assert!(eig.min() >= -1e-9 * p.norm().max(1.0));
        // A PSD input is returned as its symmetric part.
        let q = p * p.transpose();
        prop_assert!((project_psd(&q) - q).norm() <= 1e-9 * q.norm().max(1.0));
    }

    #[test]
    fn binary_frames_round_trip_bitwise(points in prop::collection::vec(vec3(1e6), 0..64)) {
        let back = parse_bin(&bin_bytes(&points)).unwrap();
        prop_assert_eq!(back.len(), points.len());
        for (a, b) in points.iter().zip(&back) {
            for k in 0..3 {
                prop_assert_eq!(a[k].to_bits(), b[k].to_bits());
            }
        }
    }
}
