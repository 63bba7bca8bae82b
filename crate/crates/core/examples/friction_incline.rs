//! A cube resting on a 20 degree ramp, with and without Coulomb friction.
//! Loads `scenes/friction_incline.json` and overrides the friction
//! coefficient.

use std::path::Path;

use vbd::harness::{build_scene, load_scene};
use vbd::math::Vec3;
use vbd::solver::step;

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenes");
    let base = load_scene(&dir.join("friction_incline.json")).expect("preset scene").config;
    let a = 20f64.to_radians();
    let down = Vec3::new(a.cos(), -a.sin(), 0.0);
    for mu in [0.9, 0.3, 0.0] {
        let mut config = base.clone();
        config.contact.mu_c = mu;
        let mut scene = build_scene(config, &dir).expect("valid scene");
        let cube = scene.model.bodies.len() - 1;
        let c0 = scene.model.body_center(cube, &scene.state.x_t);
        for _ in 0..scene.config.frames * scene.params.substeps {
            step(&scene.model, &mut scene.state, &scene.params, &scene.table).expect("finite state");
        }
        let drift = (scene.model.body_center(cube, &scene.state.x_t) - c0).dot(&down);
        println!("mu_c = {mu:.1}: slid {drift:.4} m in 2 s ({} contacts at the end)", scene.state.contacts.len());
    }
}
