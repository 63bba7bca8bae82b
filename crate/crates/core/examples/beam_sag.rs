//! A cantilever beam clamped at one end sagging under gravity, with
//! Chebyshev acceleration and Rayleigh damping. Loads `scenes/beam_sag.json`.

use std::path::Path;

use vbd::harness::load_scene;
use vbd::solver::step;

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenes/beam_sag.json");
    let mut scene = load_scene(&path).expect("preset scene");
    let tip = (0..scene.model.num_vertices())
        .max_by(|&a, &b| scene.state.x_t[a].x.total_cmp(&scene.state.x_t[b].x))
        .unwrap();
    let y0 = scene.state.x_t[tip].y;
    for frame in 0..scene.config.frames {
        for _ in 0..scene.params.substeps {
            step(&scene.model, &mut scene.state, &scene.params, &scene.table).expect("finite state");
        }
        if frame % 20 == 19 {
            println!("t = {:.2} s: tip deflection {:.4} m", (frame + 1) as f64 / 60.0, scene.state.x_t[tip].y - y0);
        }
    }
}
