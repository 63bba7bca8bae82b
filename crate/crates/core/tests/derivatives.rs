mod common;

use common::{rand_vec, rng};
use nalgebra::DMatrix;
use rand::Rng;
use vbd::contact::{friction_derivatives_with_lambda, friction_exact_hessian, FrictionParams};
use vbd::materials::{damping_terms, snh_derivatives, snh_tet_gradient_hessian, spring_derivatives, MaterialParams};
use vbd::math::{Mat3, Vec3};
use vbd::mesh::{edge_matrix, Spring};

#[test]
fn neo_hookean_matches_finite_differences() {
    let e = common::neo_hookean_oracle(200, 11);
    assert!(e.gradient <= 1e-5, "{e:?}");
    assert!(e.hessian <= 1e-3, "{e:?}");
}

#[test]
fn spring_matches_finite_differences() {
    let e = common::spring_oracle(200, 12);
    assert!(e.gradient <= 1e-5 && e.hessian <= 1e-3, "{e:?}");
}

#[test]
fn contact_matches_finite_differences() {
    let e = common::contact_oracle(200, 13);
    assert!(e.gradient <= 1e-5 && e.hessian <= 1e-3, "{e:?}");
}

#[test]
fn friction_matches_finite_differences() {
    let e = common::friction_oracle(200, 14);
    assert!(e.gradient <= 1e-5 && e.hessian <= 1e-3, "{e:?}");
}

#[test]
fn per_vertex_tet_blocks_match_full_hessian() {
    let mut r = rng(21);
    let tet = [0, 1, 2, 3];
    let rest = vec![Vec3::zeros(), Vec3::x(), Vec3::y(), Vec3::z()];
    let dm = edge_matrix(&rest, &tet);
    let inv = dm.try_inverse().unwrap();
    let vol = dm.determinant() / 6.0;
    let params = MaterialParams::new(2e5, 3e6, 0.0);
    for _ in 0..50 {
        let x: Vec<Vec3> = rest.iter().map(|p| p + rand_vec(&mut r, 0.2)).collect();
        let full = snh_tet_gradient_hessian(&tet, &x, &inv, vol, &params);
        for s in 0..4 {
            let d = snh_derivatives(&tet, &x, &inv, vol, &params, s);
            let g = full.gradient.fixed_rows::<3>(3 * s).into_owned();
            let h = full.hessian.fixed_view::<3, 3>(3 * s, 3 * s).into_owned();
            assert!((d.force + g).norm() <= 1e-9 * g.norm().max(1.0));
            assert!((d.hessian - h).norm() <= 1e-9 * h.norm());
            assert!((d.energy - full.energy).abs() <= 1e-12 * full.energy.abs().max(1.0));
        }
    }
}

#[test]
fn per_endpoint_spring_terms_are_opposite() {
    let mut r = rng(22);
    for _ in 0..50 {
        let x = vec![rand_vec(&mut r, 1.0), rand_vec(&mut r, 1.0) + Vec3::repeat(3.0)];
        let s = Spring {
            i: 0,
            j: 1,
            rest_length: r.gen_range(0.5..6.0),
            stiffness: 100.0,
        };
        let a = spring_derivatives(&s, &x, 0);
        let b = spring_derivatives(&s, &x, 1);
        assert!((a.force + b.force).norm() < 1e-10);
        assert_eq!(a.hessian, b.hessian);
    }
}

#[test]
fn exact_friction_hessian_is_symmetric_and_tangential() {
    let mut r = rng(23);
    let params = FrictionParams { mu_c: 0.4, eps_v: 1e-2 };
    let h = 1.0 / 60.0;
    for _ in 0..50 {
        let (c, x_t) = common::random_contact(&mut r, vbd::contact::ContactKind::EdgeEdge);
        let mut x = x_t.clone();
        x[2] += rand_vec(&mut r, 1e-3);
        let m = friction_exact_hessian(&c, &x, &x_t, &params, h, 2, 10.0);
        assert!((m - m.transpose()).norm() <= 1e-9 * m.norm().max(1e-12));
        assert!((m * c.normal).norm() <= 1e-9 * m.norm().max(1e-12));
        // The lagged solver Hessian is PSD.
        let lagged = friction_derivatives_with_lambda(&c, &x, &x_t, &params, h, 2, 10.0).hessian;
        let eig = lagged.symmetric_eigenvalues();
        assert!(eig.min() >= -1e-9 * lagged.norm());
    }
}

#[test]
fn damping_force_opposes_step_displacement() {
    let mut r = rng(24);
    for _ in 0..50 {
        let a = Mat3::from_fn(|_, _| r.gen_range(-1.0..1.0));
        let k = a * a.transpose() + Mat3::identity();
        let x_t = rand_vec(&mut r, 1.0);
        let x = x_t + rand_vec(&mut r, 0.1);
        let (f, hd) = damping_terms(&k, &x, &x_t, 1e-3, 0.01);
        assert!(f.dot(&(x - x_t)) <= 0.0);
        // Force is linear in x with slope -hd.
        let dx = rand_vec(&mut r, 0.01);
        let (f2, _) = damping_terms(&k, &(x + dx), &x_t, 1e-3, 0.01);
        let pred = f - hd * dx;
        assert!((f2 - pred).norm() <= 1e-9 * f2.norm().max(1e-12));
        let d = DMatrix::from_column_slice(3, 3, hd.as_slice());
        assert!(d.symmetric_eigenvalues().min() > 0.0);
    }
}

#[test]
fn friction_respects_the_coulomb_bound() {
    let mut r = rng(25);
    let params = FrictionParams { mu_c: 0.7, eps_v: 1e-2 };
    let h = 1.0 / 300.0;
    for _ in 0..500 {
        let (c, x_t) = common::random_contact(&mut r, vbd::contact::ContactKind::VertexTriangle);
        let mut x = x_t.clone();
        let size = 10f64.powf(r.gen_range(-8.0..-1.0));
        x[0] += rand_vec(&mut r, size);
        let lambda = vbd::contact::normal_force(&c, &x);
        let f = vbd::contact::friction_derivatives(&c, &x, &x_t, &params, h, c.indices[0]).force;
        assert!(f.norm() <= params.mu_c * lambda.abs() * (1.0 + 1e-9));
        assert!(f.dot(&c.normal).abs() <= 1e-9 * f.norm().max(1e-300));
    }
}
