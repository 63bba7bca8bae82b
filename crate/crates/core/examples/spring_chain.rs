//! A 20-particle spring chain with a heavy last particle swinging from a
//! pinned end, at the preset stiffness and 100 times softer.

use std::path::Path;

use vbd::harness::{build_scene, load_scene, Generator};
use vbd::solver::step;

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenes");
    let base = load_scene(&dir.join("chain.json")).expect("preset scene").config;
    for scale in [1.0, 0.01] {
        let mut config = base.clone();
        if let Generator::Chain { stiffness, .. } = &mut config.objects[0].generator {
            *stiffness *= scale;
        }
        let mut scene = build_scene(config, &dir).expect("valid scene");
        let mut worst: f64 = 0.0;
        for _ in 0..scene.config.frames {
            step(&scene.model, &mut scene.state, &scene.params, &scene.table).expect("finite state");
            let x = &scene.state.x_t;
            for s in &scene.model.springs {
                worst = worst.max(((x[s.i] - x[s.j]).norm() - s.rest_length) / s.rest_length);
            }
        }
        println!("stiffness x{scale}: max extension {:.3}%", 100.0 * worst);
    }
}
