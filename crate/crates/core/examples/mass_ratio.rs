//! A heavy cube dropped onto a cube 2000 times lighter sitting on the
//! floor. Loads `scenes/mass_ratio.json`.

use std::path::Path;

use vbd::harness::load_scene;
use vbd::solver::step;

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenes/mass_ratio.json");
    let mut scene = load_scene(&path).expect("preset scene");
    let m = &scene.model;
    println!("mass ratio 1:{:.0}", m.body_mass(1) / m.body_mass(0));
    let rest = m.body_volume(0, &m.rest_positions);
    for frame in 0..scene.config.frames {
        for _ in 0..scene.params.substeps {
            step(&scene.model, &mut scene.state, &scene.params, &scene.table).expect("finite state");
        }
        if frame % 20 == 19 {
            let x = &scene.state.x_t;
            println!(
                "frame {:3}: light volume {:.3}, heavy center y {:.3}, contacts {}",
                frame + 1,
                scene.model.body_volume(0, x) / rest,
                scene.model.body_center(1, x).y,
                scene.state.contacts.len()
            );
        }
    }
}
