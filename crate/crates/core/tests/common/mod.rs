//! Finite-difference oracles shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use vbd::contact::{
    contact_derivatives, contact_energy, friction_derivatives_with_lambda, friction_exact_hessian,
    Contact, ContactKind, DetectionSource, FrictionParams,
};
use vbd::harness::{build_scene, parse_scene, Scene, SceneConfig};
use vbd::materials::{snh_energy, snh_tet_gradient_hessian, spring_energy, spring_gradient_hessian, MaterialParams};
use vbd::math::{Mat3, Vec3};
use vbd::mesh::{edge_matrix, Spring};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn scenes_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenes")
}

pub fn preset(name: &str) -> SceneConfig {
    let path = scenes_dir().join(format!("{name}.json"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_scene(&text).unwrap()
}

pub fn build(config: SceneConfig) -> Scene {
    build_scene(config, &scenes_dir()).unwrap()
}

pub fn rand_vec(rng: &mut impl Rng, scale: f64) -> Vec3 {
    Vec3::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    ) * scale
}

/// `||a - b|| / max(||b||, floor)`.
pub fn rel_err(a: &[f64], b: &[f64], floor: f64) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let norm: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    diff / norm.max(floor)
}

/// Central differences of a scalar function of `n` coordinates.
pub fn fd_gradient(x: &[f64], eps: f64, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    let mut p = x.to_vec();
    for k in 0..x.len() {
        p[k] = x[k] + eps;
        let fp = f(&p);
        p[k] = x[k] - eps;
        let fm = f(&p);
        p[k] = x[k];
        g[k] = (fp - fm) / (2.0 * eps);
    }
    g
}

/// Central differences of a vector function; column `k` is `d g / d x_k`.
pub fn fd_jacobian(x: &[f64], eps: f64, g: impl Fn(&[f64]) -> Vec<f64>) -> DMatrix<f64> {
    let m = g(x).len();
    let mut jac = DMatrix::zeros(m, x.len());
    let mut p = x.to_vec();
    for k in 0..x.len() {
        p[k] = x[k] + eps;
        let gp = g(&p);
        p[k] = x[k] - eps;
        let gm = g(&p);
        p[k] = x[k];
        for r in 0..m {
            jac[(r, k)] = (gp[r] - gm[r]) / (2.0 * eps);
        }
    }
    jac
}

fn flatten(points: &[Vec3]) -> Vec<f64> {
    points.iter().flat_map(|p| [p.x, p.y, p.z]).collect()
}

fn unflatten(x: &[f64]) -> Vec<Vec3> {
    x.chunks(3).map(|c| Vec3::new(c[0], c[1], c[2])).collect()
}

/// Worst gradient and Hessian relative errors over a batch of samples.
#[derive(Debug, Clone, Copy, Default)]
pub struct OracleErrors {
    pub gradient: f64,
    pub hessian: f64,
}

impl OracleErrors {
    fn add(&mut self, g: f64, h: f64) {
        self.gradient = self.gradient.max(g);
        self.hessian = self.hessian.max(h);
    }
}

fn random_tet(rng: &mut impl Rng) -> (Vec<Vec3>, Mat3, f64) {
    let tet = [0, 1, 2, 3];
    loop {
        let rest: Vec<Vec3> = [Vec3::zeros(), Vec3::x(), Vec3::y(), Vec3::z()]
            .iter()
            .map(|p| p * 0.1 + rand_vec(rng, 0.02))
            .collect();
        let dm = edge_matrix(&rest, &tet);
        let det = dm.determinant();
        if det > 1e-4 {
            let inv = dm.try_inverse().unwrap();
            let deform = Mat3::identity() + Mat3::from_fn(|_, _| rng.gen_range(-0.3..0.3));
            let x = rest.iter().map(|p| deform * p + rand_vec(rng, 0.01)).collect();
            return (x, inv, det / 6.0);
        }
    }
}

pub fn neo_hookean_oracle(samples: usize, seed: u64) -> OracleErrors {
    let mut rng = rng(seed);
    let mut errs = OracleErrors::default();
    let tet = [0, 1, 2, 3];
    for _ in 0..samples {
        let (x, inv, vol) = random_tet(&mut rng);
        let mu = rng.gen_range(1e4..1e6);
        let params = MaterialParams::new(mu, mu * rng.gen_range(1.0..20.0), 0.0);
        let x0 = flatten(&x);
        let gh = snh_tet_gradient_hessian(&tet, &x, &inv, vol, &params);
        let fd = fd_gradient(&x0, 1e-7, |p| snh_energy(&tet, &unflatten(p), &inv, vol, &params));
        let jac = fd_jacobian(&x0, 1e-7, |p| {
            snh_tet_gradient_hessian(&tet, &unflatten(p), &inv, vol, &params)
                .gradient
                .as_slice()
                .to_vec()
        });
        let h = DMatrix::from_column_slice(12, 12, gh.hessian.as_slice());
        errs.add(
            rel_err(gh.gradient.as_slice(), &fd, 1e-12),
            rel_err(h.as_slice(), jac.as_slice(), 1e-12),
        );
    }
    errs
}

pub fn spring_oracle(samples: usize, seed: u64) -> OracleErrors {
    let mut rng = rng(seed);
    let mut errs = OracleErrors::default();
    for _ in 0..samples {
        let a = rand_vec(&mut rng, 1.0);
        let b = a + rand_vec(&mut rng, 1.0) + Vec3::repeat(0.2);
        let rest = (b - a).norm() * rng.gen_range(0.5..1.5);
        let s = Spring {
            i: 0,
            j: 1,
            rest_length: rest,
            stiffness: rng.gen_range(1.0..1e5),
        };
        let x0 = flatten(&[a, b]);
        let (_, g, h) = spring_gradient_hessian(&s, &[a, b]);
        let fd = fd_gradient(&x0, 1e-7, |p| spring_energy(&s, &unflatten(p)));
        let jac = fd_jacobian(&x0, 1e-7, |p| {
            spring_gradient_hessian(&s, &unflatten(p)).1.as_slice().to_vec()
        });
        errs.add(
            rel_err(g.as_slice(), &fd, 1e-12),
            rel_err(h.as_slice(), jac.as_slice(), 1e-12),
        );
    }
    errs
}

/// A penetrating contact between random points, plus the positions.
pub fn random_contact(rng: &mut impl Rng, kind: ContactKind) -> (Contact, Vec<Vec3>) {
    let normal = rand_vec(rng, 1.0).normalize();
    let x: Vec<Vec3> = (0..4).map(|_| rand_vec(rng, 0.1)).collect();
    let bary = match kind {
        ContactKind::VertexTriangle => {
            let w = [rng.gen_range(0.05..1.0), rng.gen_range(0.05..1.0), rng.gen_range(0.05..1.0)];
            let s: f64 = w.iter().sum();
            [1.0, w[0] / s, w[1] / s, w[2] / s]
        }
        ContactKind::EdgeEdge => {
            let s = rng.gen_range(0.05..0.95);
            let u = rng.gen_range(0.05..0.95);
            [1.0 - s, s, 1.0 - u, u]
        }
    };
    let mut c = Contact::new(kind, DetectionSource::Ccd, [0, 1, 2, 3], bary, normal, rng.gen_range(1e3..1e7), &x);
    // Push the second side through the first along the normal.
    let depth = rng.gen_range(1e-3..1e-2);
    let shift = depth - c.signed_depth(&x);
    let mut x = x;
    for k in c.a_side_len()..4 {
        x[k] += shift * normal;
    }
    c.refresh_anchors(&x);
    (c, x)
}

pub fn contact_oracle(samples: usize, seed: u64) -> OracleErrors {
    let mut rng = rng(seed);
    let mut errs = OracleErrors::default();
    for s in 0..samples {
        let kind = if s % 2 == 0 {
            ContactKind::VertexTriangle
        } else {
            ContactKind::EdgeEdge
        };
        let (c, x) = random_contact(&mut rng, kind);
        let x0 = flatten(&x);
        let grad: Vec<f64> = (0..4).flat_map(|v| (-contact_derivatives(&c, &x, v).force).as_slice().to_vec()).collect();
        let fd = fd_gradient(&x0, 1e-8, |p| contact_energy(&c, &unflatten(p)));
        // Per-vertex diagonal blocks against differences of that vertex's force.
        let mut h_err: f64 = 0.0;
        for v in 0..4 {
            let jac = fd_jacobian(&x0, 1e-8, |p| {
                (-contact_derivatives(&c, &unflatten(p), v).force).as_slice().to_vec()
            });
            let block = jac.view((0, 3 * v), (3, 3)).into_owned();
            let h = contact_derivatives(&c, &x, v).hessian;
            h_err = h_err.max(rel_err(h.as_slice(), block.as_slice(), 1e-12));
        }
        errs.add(rel_err(&grad, &fd, 1e-12), h_err);
    }
    errs
}

/// Friction at a fixed normal force: force against differences of the
/// dissipative potential, exact Hessian against differences of the force.
pub fn friction_oracle(samples: usize, seed: u64) -> OracleErrors {
    let mut rng = rng(seed);
    let mut errs = OracleErrors::default();
    let h = 1.0 / 300.0;
    let params = FrictionParams { mu_c: 0.5, eps_v: 1e-2 };
    let eh = params.eps_v * h;
    let mut done = 0;
    while done < samples {
        let (c, x_t) = random_contact(&mut rng, ContactKind::VertexTriangle);
        // Relative slide in the static or the dynamic regime, away from the
        // kink at `eps_v h` where the potential is only C1.
        let target = if done % 2 == 0 {
            rng.gen_range(0.2..0.8) * eh
        } else {
            rng.gen_range(1.5..20.0) * eh
        };
        let dir = rng.gen_range(0.0..std::f64::consts::TAU);
        let slide = target * (dir.cos() * c.tangent[0] + dir.sin() * c.tangent[1]);
        let v = rng.gen_range(0..4);
        let mut x = x_t.clone();
        x[v] -= slide / c.coeff(v).abs().max(1e-3) * c.coeff(v).signum();
        let u = {
            let mut dx = Vec3::zeros();
            for k in 0..4 {
                dx -= c.coeff(k) * (x[k] - x_t[k]);
            }
            Vec3::new(dx.dot(&c.tangent[0]), dx.dot(&c.tangent[1]), 0.0).norm()
        };
        if (u - eh).abs() < 0.1 * eh || u < 0.1 * eh {
            continue;
        }
        done += 1;
        let lambda = rng.gen_range(1.0..1e3);
        let at = |p: &[f64]| {
            let mut y = x.clone();
            y[v] = Vec3::new(p[0], p[1], p[2]);
            y
        };
        let x0 = x[v].as_slice().to_vec();
        let d = friction_derivatives_with_lambda(&c, &x, &x_t, &params, h, v, lambda);
        let eps = 1e-4 * eh;
        let fd = fd_gradient(&x0, eps, |p| {
            friction_derivatives_with_lambda(&c, &at(p), &x_t, &params, h, v, lambda).energy
        });
        let jac = fd_jacobian(&x0, eps, |p| {
            (-friction_derivatives_with_lambda(&c, &at(p), &x_t, &params, h, v, lambda).force)
                .as_slice()
                .to_vec()
        });
        let hex = friction_exact_hessian(&c, &x, &x_t, &params, h, v, lambda);
        errs.add(
            rel_err((-d.force).as_slice(), &fd, 1e-12),
            rel_err(hex.as_slice(), jac.as_slice(), 1e-12),
        );
    }
    errs
}

pub fn scene_from_json(text: &str) -> Scene {
    build(parse_scene(text).unwrap())
}

/// A 4x2x2 beam stretched 20% along x, without gravity or contacts.
pub const STRETCHED_BEAM: &str = r#"{
  "objects": [{
    "generator": { "type": "beam", "nx": 4, "ny": 2, "nz": 2, "spacing": 0.1 },
    "material": { "mu": 1e5, "lambda": 1e6 },
    "stretch": { "scale": [1.2, 1, 1] }
  }],
  "gravity": [0, 0, 0],
  "solver": { "h": 0.01, "n_max": 10, "init_mode": "prev_pos" }
}"#;
