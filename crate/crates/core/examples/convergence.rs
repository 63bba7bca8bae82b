//! Relative loss of VBD, accelerated VBD, block Jacobi and gradient descent
//! on one time step of a released, pre-stretched beam.

use std::path::Path;

use vbd::baselines::Method;
use vbd::harness::{load_scene, run_convergence};

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenes/beam_release.json");
    let scene = load_scene(&path).expect("preset scene");
    let methods = [Method::Vbd, Method::VbdChebyshev(0.95), Method::BlockJacobi, Method::GradientDescent];
    let report = run_convergence(&scene, &methods, 100, None).expect("convergence run");
    println!("G0 = {:.6e}, G* = {:.6e}", report.g0, report.g_star);
    println!("{:>10} {:>12} {:>12} {:>12}", "method", "iter 10", "iter 50", "iter 100");
    for trace in &report.traces {
        let rl = report.relative_losses(trace);
        println!("{:>10} {:>12.4e} {:>12.4e} {:>12.4e}", trace.method.name(), rl[10], rl[50], rl[100]);
    }
}
