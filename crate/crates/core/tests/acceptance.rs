//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{build, preset};
use vbd::baselines::{newton_converge, gradient_inf_norm, run_trace, Method, SolverTrace};
use vbd::harness::{run_convergence, Generator, Scene};
use vbd::math::Vec3;
use vbd::mesh::{bounding_box, SpringNet};
use vbd::solver::{
    begin_step, iterate, step, with_threads, ConstraintTable, LineSearch, ModelBuilder, SimState,
    SolverParams,
};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Advances `frames` frames; `on_step` sees the scene after every step.
fn run_frames(scene: &mut Scene, frames: usize, mut on_step: impl FnMut(&Scene)) -> Result<(), String> {
    for f in 0..frames {
        scene.drive(f);
        for _ in 0..scene.params.substeps {
            step(&scene.model, &mut scene.state, &scene.params, &scene.table)
                .map_err(|e| e.to_string())?;
            on_step(scene);
        }
    }
    Ok(())
}

fn prepared(scene: &Scene) -> SimState {
    let mut st = scene.state.clone();
    begin_step(&scene.model, &mut st, &scene.params, &scene.table).unwrap();
    st
}

fn derivative_oracles() -> Outcome {
    let results = [
        ("neo-hookean", common::neo_hookean_oracle(100, 1)),
        ("spring", common::spring_oracle(100, 2)),
        ("contact", common::contact_oracle(100, 3)),
        ("friction", common::friction_oracle(100, 4)),
    ];
    let ok = results.iter().all(|(_, e)| e.gradient <= 1e-5 && e.hessian <= 1e-3);
    let detail = results
        .iter()
        .map(|(n, e)| format!("{n} grad {:.1e} hess {:.1e}", e.gradient, e.hessian))
        .collect::<Vec<_>>()
        .join(", ");
    check(ok, detail)
}

fn inertia_only() -> Outcome {
    let x0 = Vec3::new(0.3, 2.0, -1.0);
    let v0 = Vec3::new(1.5, 4.0, 0.25);
    let net = SpringNet::new(vec![x0], vec![], vec![0.7]).unwrap();
    let mut b = ModelBuilder::new();
    b.add_spring_net(&net);
    let model = b.build();
    let table = ConstraintTable::unconstrained(1);
    let params = SolverParams {
        h: 1.0 / 60.0,
        n_max: 1,
        ..SolverParams::default()
    };
    let mut st = SimState::new(vec![x0], vec![v0]);
    step(&model, &mut st, &params, &table).map_err(|e| e.to_string())?;
    let h = params.h;
    let y = x0 + h * v0 + h * h * params.a_ext;
    let v = v0 + h * params.a_ext;
    let ex = (st.x_t[0] - y).norm() / y.norm();
    let ev = (st.v_t[0] - v).norm() / v.norm();
    check(ex <= 1e-12 && ev <= 1e-12, format!("x rel err {ex:.1e}, v rel err {ev:.1e}"))
}

fn convergence_ordering() -> Outcome {
    let scene = build(preset("beam_release"));
    let methods = [Method::Vbd, Method::VbdChebyshev(0.95), Method::BlockJacobi, Method::GradientDescent];
    let report = run_convergence(&scene, &methods, 100, None).map_err(|e| e.to_string())?;
    let last: Vec<f64> = report
        .traces
        .iter()
        .map(|t| *report.relative_losses(t).last().unwrap())
        .collect();
    let (vbd, cheb, jacobi, gd) = (last[0], last[1], last[2], last[3]);
    check(
        vbd < jacobi && jacobi < gd && cheb <= vbd,
        format!(
            "{} vertices; vbd {vbd:.4e}, vbd-cheb {cheb:.4e}, jacobi {jacobi:.4e}, gd {gd:.4e}",
            scene.model.num_vertices()
        ),
    )
}

fn newton_cross_validation() -> Outcome {
    let scene = build(preset("beam_release"));
    let (model, params, table) = (&scene.model, &scene.params, &scene.table);
    let mut st = prepared(&scene);
    let start = st.x.clone();
    let newton = newton_converge(model, &st, params, table, 1e-10, 200);
    let mut n = 0;
    let mut grad = gradient_inf_norm(model, &st, params, table, &st.x);
    while grad >= 1e-8 && n < 40_000 {
        n += 1;
        iterate(model, &mut st, params, table, n).map_err(|e| e.to_string())?;
        if n % 100 == 0 {
            grad = gradient_inf_norm(model, &st, params, table, &st.x);
        }
    }
    let diff = st
        .x
        .iter()
        .zip(&newton.positions)
        .map(|(a, b)| (a - b).norm_squared())
        .sum::<f64>()
        .sqrt();
    let disp = newton
        .positions
        .iter()
        .zip(&start)
        .map(|(a, b)| (a - b).norm_squared())
        .sum::<f64>()
        .sqrt();
    let rel = diff / disp;
    check(
        grad < 1e-8 && rel <= 1e-6,
        format!("vbd grad {grad:.1e} after {n} iterations, newton grad {:.1e}, relative difference {rel:.1e}", newton.gradient_inf),
    )
}

/// Center-of-mass displacement of the cube down the ramp after the run,
/// together with the positions after every step.
fn incline_drift(mu: f64) -> Result<(f64, Vec<Vec<Vec3>>), String> {
    let mut config = preset("friction_incline");
    config.contact.mu_c = mu;
    let frames = config.frames;
    let mut scene = build(config);
    let cube = scene.model.bodies.len() - 1;
    let c0 = scene.model.body_center(cube, &scene.state.x_t);
    let mut trajectory = Vec::new();
    run_frames(&mut scene, frames, |s| trajectory.push(s.state.x_t.clone()))?;
    let a = 20f64.to_radians();
    let down = Vec3::new(a.cos(), -a.sin(), 0.0);
    let drift = (scene.model.body_center(cube, &scene.state.x_t) - c0).dot(&down);
    Ok((drift, trajectory))
}

fn friction_incline() -> Outcome {
    let config = preset("friction_incline");
    let seconds = config.frames as f64 * config.solver_params().h * config.solver.substeps as f64;
    let (stick, _) = incline_drift(0.9)?;
    let (slide, _) = incline_drift(0.0)?;
    check(
        stick.abs() <= 0.02 * 0.5 && slide >= 10.0 * stick.abs(),
        format!("{seconds:.2} s simulated; drift mu=0.9 {:.3e} m, mu=0 {slide:.3e} m", stick),
    )
}

fn mass_ratio() -> Outcome {
    let mut scene = build(preset("mass_ratio"));
    let frames = scene.config.frames;
    let masses: Vec<f64> = (0..2).map(|b| scene.model.body_mass(b)).collect();
    let rest: Vec<f64> = (0..2).map(|b| scene.model.body_volume(b, &scene.model.rest_positions)).collect();
    let mut min_ratio = f64::INFINITY;
    run_frames(&mut scene, frames, |s| {
        min_ratio = min_ratio.min(s.model.body_volume(0, &s.state.x_t) / rest[0]);
    })?;
    let x = &scene.state.x_t;
    let finite = x.iter().all(|p| p.iter().all(|c| c.is_finite()));
    let ratio = scene.model.body_volume(0, x) / rest[0];
    let heavy_y = scene.model.body_center(1, x).y;
    check(
        finite && ratio >= 0.5,
        format!(
            "mass ratio 1:{:.0}, {} + {} vertices; final light volume {ratio:.3}, min {min_ratio:.3}, heavy center y {heavy_y:.3}",
            masses[1] / masses[0],
            scene.model.bodies[0].vertices.len(),
            scene.model.bodies[1].vertices.len()
        ),
    )
}

fn single_iteration_stability() -> Outcome {
    let mut scene = build(preset("pulled_vertex"));
    let (lo, hi) = bounding_box(&scene.state.x_t);
    let center = 0.5 * (lo + hi);
    let diag = (hi - lo).norm();
    let mut worst: f64 = 0.0;
    let mut finite = true;
    run_frames(&mut scene, 500, |s| {
        for p in &s.state.x_t {
            finite &= p.iter().all(|c| c.is_finite());
            worst = worst.max((p - center).norm());
        }
    })?;
    check(
        finite && worst <= 10.0 * diag,
        format!("n_max {}, max distance {:.3} vs bound {:.3}", scene.params.n_max, worst, 10.0 * diag),
    )
}

fn max_chain_extension(stiffness_scale: f64) -> Result<f64, String> {
    let mut config = preset("chain");
    if let Generator::Chain { stiffness, .. } = &mut config.objects[0].generator {
        *stiffness *= stiffness_scale;
    }
    let frames = config.frames;
    let mut scene = build(config);
    let mut worst: f64 = 0.0;
    run_frames(&mut scene, frames, |s| {
        let x = &s.state.x_t;
        for sp in &s.model.springs {
            worst = worst.max(((x[sp.i] - x[sp.j]).norm() - sp.rest_length) / sp.rest_length);
        }
    })?;
    Ok(worst)
}

fn spring_chain() -> Outcome {
    let stiff = max_chain_extension(1.0)?;
    let soft = max_chain_extension(0.01)?;
    check(
        stiff <= 0.01 && soft >= 5.0 * stiff,
        format!("max extension stiff {:.3}%, soft {:.3}%", 100.0 * stiff, 100.0 * soft),
    )
}

fn traces_bitwise_equal(a: &SolverTrace, b: &SolverTrace) -> bool {
    a.rows.len() == b.rows.len()
        && a.rows.iter().zip(&b.rows).all(|(p, q)| p.energy.to_bits() == q.energy.to_bits())
        && positions_bitwise_equal(&a.positions, &b.positions)
}

fn positions_bitwise_equal(a: &[Vec3], b: &[Vec3]) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(p, q)| (0..3).all(|k| p[k].to_bits() == q[k].to_bits()))
}

fn determinism() -> Outcome {
    let scene = build(preset("beam_release"));
    let st = prepared(&scene);
    let methods = [Method::Vbd, Method::VbdChebyshev(0.95), Method::BlockJacobi, Method::GradientDescent];
    let traces = |threads: usize| {
        with_threads(threads, || {
            methods
                .iter()
                .map(|&m| run_trace(&scene.model, &st, &scene.params, &scene.table, m, 100).unwrap())
                .collect::<Vec<_>>()
        })
    };
    let (t1, t8) = (traces(1), traces(8));
    let convergence = t1.iter().zip(&t8).all(|(a, b)| traces_bitwise_equal(a, b));

    let (_, one) = with_threads(1, || incline_drift(0.9))?;
    let (_, eight) = with_threads(8, || incline_drift(0.9))?;
    let incline = one.len() == eight.len() && one.iter().zip(&eight).all(|(a, b)| positions_bitwise_equal(a, b));

    let zero = run_trace(&scene.model, &st, &scene.params, &scene.table, Method::VbdChebyshev(0.0), 100)
        .map_err(|e| e.to_string())?;
    let rho_zero = traces_bitwise_equal(&zero, &t1[0]);
    check(
        convergence && incline && rho_zero,
        format!("convergence traces {convergence}, incline trajectory {incline}, rho=0 vs plain {rho_zero}"),
    )
}

fn descent_property() -> Outcome {
    let mut config = preset("beam_release");
    config.solver.line_search = LineSearch::LocalBacktracking;
    let scene = build(config);
    let st = prepared(&scene);
    let trace = run_trace(&scene.model, &st, &scene.params, &scene.table, Method::Vbd, 100)
        .map_err(|e| e.to_string())?;
    let e = trace.energies();
    let worst = e
        .windows(2)
        .map(|w| (w[1] - w[0]) / w[0].abs())
        .fold(f64::NEG_INFINITY, f64::max);
    check(
        worst <= 1e-9,
        format!("largest relative increase over 100 iterations {worst:.2e} (G {:.6e} -> {:.6e})", e[0], e[100]),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn() -> Outcome); 10] = [
        ("derivative oracles", 10, derivative_oracles),
        ("inertia-only exactness", 1, inertia_only),
        ("convergence ordering", 60, convergence_ordering),
        ("newton cross-validation", 60, newton_cross_validation),
        ("friction incline", 120, friction_incline),
        ("mass ratio", 120, mass_ratio),
        ("single-iteration stability", 60, single_iteration_stability),
        ("mass-spring chain", 60, spring_chain),
        ("determinism", 120, determinism),
        ("descent property", 60, descent_property),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*budget);
        let (ok, detail) = match outcome {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {name}: {detail} [{:.2} s of {budget} s]",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if failed == 0 {
        println!("all acceptance criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
