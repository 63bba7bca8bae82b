//! Experiment drivers: frame-by-frame simulation and single-step
//! convergence traces.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use super::output::{export_frame, frame_file_name, MetricsRow, MetricsWriter};
use super::scene::Scene;
use super::HarnessError;
use crate::baselines::{newton_converge, relative_loss, run_trace, Method, SolverTrace};
use crate::solver::{begin_step, step_observed, variational_energy, SolverError};

/// Wall-clock statistics of a run, in milliseconds per solver step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    pub frames: usize,
    pub steps: usize,
    pub avg_ms: f64,
    pub max_ms: f64,
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} frames, {} steps, {:.3} ms avg / {:.3} ms max per step",
            self.frames, self.steps, self.avg_ms, self.max_ms
        )
    }
}

/// Runs `frames` frames (the scene's own count when `None`) of `S` steps
/// each. Writes `metrics.csv` and one frame file per frame into `out_dir`.
/// A non-finite state stops the run after writing the last good positions
/// as `last_good.<ext>`.
pub fn run_simulation(
    scene: &mut Scene,
    out_dir: &Path,
    frames: Option<usize>,
) -> Result<RunSummary, HarnessError> {
    std::fs::create_dir_all(out_dir).map_err(|source| HarnessError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let frames = frames.unwrap_or(scene.config.frames);
    let format = scene.config.output.format;
    let per_iteration = scene.config.output.per_iteration;
    let mut metrics = MetricsWriter::create(&out_dir.join("metrics.csv"))?;
    let mut times = Vec::with_capacity(frames * scene.params.substeps);

    for frame in 0..frames {
        scene.drive(frame);
        for _ in 0..scene.params.substeps {
            let Scene {
                model,
                table,
                params,
                state,
                ..
            } = &mut *scene;
            let step = state.step_index;
            let n_max = params.n_max;
            let start = Instant::now();
            let mut rows = Vec::new();
            let result = step_observed(model, state, params, table, &mut |info| {
                if per_iteration || info.iteration == n_max {
                    let st = info.state;
                    rows.push(MetricsRow {
                        step,
                        iteration: info.iteration,
                        energy: variational_energy(model, st, params, table, &st.x),
                        relative_loss: None,
                        contact_count: st.contacts.len(),
                        max_penetration: st.contacts.max_penetration(&st.x),
                        wall_ms: start.elapsed().as_secs_f64() * 1e3,
                    });
                }
            });
            for r in &rows {
                metrics.push(r)?;
            }
            match result {
                Ok(stats) => times.push(stats.wall.as_secs_f64() * 1e3),
                Err(e) => {
                    metrics.flush()?;
                    if let Some(name) = frame_file_name(0, format) {
                        let ext = name.rsplit('.').next().unwrap_or("obj");
                        let path = out_dir.join(format!("last_good.{ext}"));
                        export_frame(&state.x_t, &model.surface_tris, &path, format)?;
                    }
                    return Err(e.into());
                }
            }
        }
        if let Some(name) = frame_file_name(frame, format) {
            export_frame(&scene.state.x_t, &scene.model.surface_tris, &out_dir.join(name), format)?;
        }
    }
    metrics.flush()?;
    let steps = times.len();
    Ok(RunSummary {
        frames,
        steps,
        avg_ms: if steps > 0 { times.iter().sum::<f64>() / steps as f64 } else { 0.0 },
        max_ms: times.iter().copied().fold(0.0, f64::max),
    })
}

pub const CONVERGENCE_HEADER: &str = "solver,iteration,G,relative_loss,seconds";

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub g0: f64,
    pub g_star: f64,
    pub traces: Vec<SolverTrace>,
}

impl ConvergenceReport {
    pub fn relative_losses(&self, trace: &SolverTrace) -> Vec<f64> {
        relative_loss(&trace.energies(), self.g_star, self.g0).expect("range checked on creation")
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(CONVERGENCE_HEADER);
        s.push('\n');
        for t in &self.traces {
            let rl = self.relative_losses(t);
            let name = match t.method {
                Method::VbdChebyshev(rho) if rho != 0.95 => format!("vbd-cheb:{rho}"),
                m => m.name().to_string(),
            };
            for (row, r) in t.rows.iter().zip(rl) {
                s.push_str(&format!("{name},{},{},{r},{}\n", row.iteration, row.energy, row.seconds));
            }
        }
        s
    }
}

/// Every method runs `iters` iterations of the scene's first time step from
/// the same warm start. `G*` comes from Newton to `||grad G||_inf < 1e-10`.
pub fn run_convergence(
    scene: &Scene,
    methods: &[Method],
    iters: usize,
    out: Option<&Path>,
) -> Result<ConvergenceReport, HarnessError> {
    let Scene {
        model,
        table,
        params,
        state,
        ..
    } = scene;
    let mut prepared = state.clone();
    begin_step(model, &mut prepared, params, table)?;
    let g0 = variational_energy(model, &prepared, params, table, &prepared.x);
    let reference = newton_converge(model, &prepared, params, table, 1e-10, 200);
    let g_star = reference.energy;
    relative_loss(&[], g_star, g0)?;
    let traces = methods
        .iter()
        .map(|&m| run_trace(model, &prepared, params, table, m, iters))
        .collect::<Result<Vec<_>, _>>()?;
    let report = ConvergenceReport { g0, g_star, traces };
    if let Some(path) = out {
        let io = |source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut f = std::fs::File::create(path).map_err(io)?;
        f.write_all(report.to_csv().as_bytes()).map_err(io)?;
    }
    Ok(report)
}

impl From<SolverError> for HarnessError {
    fn from(e: SolverError) -> Self {
        HarnessError::Solver(e)
    }
}
