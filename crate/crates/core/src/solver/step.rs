use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::{local_solve, ConstraintTable, InitMode, Model, SimState, SolverError, SolverParams};
use crate::contact::{
    broad_phase, ccd_edge_edge, ccd_vertex_triangle, detect_penetrations, recompute_dcd_anchor,
    DetectionSource,
};
use crate::math::{is_finite3, Vec3};

/// `y = x^t + h v^t + h^2 a_ext`.
pub fn inertia_target(x_t: &[Vec3], v_t: &[Vec3], a_ext: &Vec3, h: f64) -> Vec<Vec3> {
    x_t.iter()
        .zip(v_t)
        .map(|(x, v)| x + h * v + h * h * a_ext)
        .collect()
}

/// Warm start for the step. Fixed vertices always move with their step-start
/// velocity and subspace-constrained vertices are projected onto their
/// subspace.
pub fn initialize(state: &SimState, params: &SolverParams, table: &ConstraintTable) -> Vec<Vec3> {
    let h = params.h;
    let a = params.a_ext;
    let a_norm = a.norm();
    let mode = match params.init_mode {
        InitMode::Adaptive if a_norm == 0.0 => InitMode::Inertia,
        m => m,
    };
    (0..state.x_t.len())
        .map(|i| {
            let (x, v) = (state.x_t[i], state.v_t[i]);
            if table.fixed[i] {
                return x + h * v;
            }
            let p = match mode {
                InitMode::PrevPos => x,
                InitMode::Inertia => x + h * v,
                InitMode::InertiaAccel => state.y[i],
                InitMode::Adaptive => {
                    let acc = (v - state.v_prev[i]) / h;
                    let along = acc.dot(&(a / a_norm));
                    let factor = if along > a_norm {
                        1.0
                    } else if along < 0.0 {
                        0.0
                    } else {
                        along / a_norm
                    };
                    x + h * v + h * h * factor * a
                }
            };
            table.project(i, &p)
        })
        .collect()
}

/// Chebyshev weight `omega_n`: `omega_1 = 1`, `omega_2 = 2 / (2 - rho^2)`,
/// then `omega_n = 4 / (4 - rho^2 omega_{n-1})`.
pub fn chebyshev_omega(rho: f64, n: usize) -> f64 {
    assert!(n >= 1, "iterations are numbered from 1");
    let mut omega = 1.0;
    for k in 2..=n {
        omega = next_omega(rho, k, omega);
    }
    omega
}

fn next_omega(rho: f64, n: usize, prev: f64) -> f64 {
    match n {
        0 | 1 => 1.0,
        2 => 2.0 / (2.0 - rho * rho),
        _ => 4.0 / (4.0 - rho * rho * prev),
    }
}

/// Blends the current iterate with the one two iterations back for every
/// vertex not flagged as colliding this step. `omega == 1` is a no-op.
pub fn accelerate(state: &mut SimState, omega: f64) {
    if omega == 1.0 {
        return;
    }
    let SimState {
        x,
        x_prev_prev,
        contacts,
        ..
    } = state;
    for (i, xi) in x.iter_mut().enumerate() {
        if !contacts.colliding[i] {
            *xi = omega * (*xi - x_prev_prev[i]) + x_prev_prev[i];
        }
    }
}

/// Solves every vertex of one color in parallel against the main buffer,
/// writes the results to `x_new` and merges them back.
pub fn color_pass(
    model: &Model,
    state: &mut SimState,
    params: &SolverParams,
    table: &ConstraintTable,
    color: usize,
    iteration: usize,
) -> Result<(), SolverError> {
    let group = &model.coloring.groups[color];
    let st: &SimState = state;
    let dx: Vec<Result<Vec3, SolverError>> = group
        .par_iter()
        .map(|&v| local_solve(model, st, params, table, v))
        .collect();
    for (&v, r) in group.iter().zip(dx) {
        let d = r.map_err(|e| match e {
            SolverError::NonFiniteState { step, vertex, .. } => SolverError::NonFiniteState {
                step,
                iteration,
                vertex,
            },
        })?;
        state.x_new[v] = state.x[v] + d;
    }
    for &v in group {
        state.x[v] = state.x_new[v];
    }
    Ok(())
}

/// Runs `f` on a dedicated pool of `threads` workers (0 picks the rayon
/// default).
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
        .install(f)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepStats {
    pub iterations: usize,
    pub contact_count: usize,
    pub max_penetration: f64,
    pub wall: Duration,
}

/// What an observer sees after each full iteration.
pub struct IterationInfo<'a> {
    pub iteration: usize,
    pub state: &'a SimState,
}

fn ccd_pass(model: &Model, state: &mut SimState, params: &SolverParams) {
    let mesh = &model.collision;
    let pairs = broad_phase(&state.x_t, &state.x, mesh, 0.0);
    let vt: Vec<(usize, [usize; 3])> = pairs
        .vertex_triangle
        .iter()
        .map(|&(v, t)| (v, mesh.triangles[t]))
        .collect();
    let ee: Vec<([usize; 2], [usize; 2])> = pairs
        .edge_edge
        .iter()
        .map(|&(a, b)| (mesh.edges[a], mesh.edges[b]))
        .collect();
    let k = params.contact.k_c;
    let mut found = ccd_vertex_triangle(&state.x_t, &state.x, &vt, k);
    found.extend(ccd_edge_edge(&state.x_t, &state.x, &ee, k));
    state.contacts.replace(DetectionSource::Ccd, found);
}

fn check_finite(state: &SimState, iteration: usize) -> Result<(), SolverError> {
    match state.x.iter().position(|p| !is_finite3(p)) {
        Some(vertex) => Err(SolverError::NonFiniteState {
            step: state.step_index,
            iteration,
            vertex,
        }),
        None => Ok(()),
    }
}

pub fn step(
    model: &Model,
    state: &mut SimState,
    params: &SolverParams,
    table: &ConstraintTable,
) -> Result<StepStats, SolverError> {
    step_observed(model, state, params, table, &mut |_| {})
}

/// Lines before the iteration loop: inertia target, step-start DCD and the
/// warm start. Resets the acceleration history.
pub fn begin_step(
    model: &Model,
    state: &mut SimState,
    params: &SolverParams,
    table: &ConstraintTable,
) -> Result<(), SolverError> {
    state.y = inertia_target(&state.x_t, &state.v_t, &params.a_ext, params.h);
    state.contacts.begin_step();
    if params.contact.enabled() {
        let dcd = detect_penetrations(
            &state.x_t,
            &model.collision,
            params.contact.dcd_radius,
            params.contact.k_c,
        );
        state.contacts.replace(DetectionSource::Dcd, dcd);
    }
    state.x = initialize(state, params, table);
    check_finite(state, 0)?;
    state.x_new.clone_from(&state.x);
    state.x_prev.clone_from(&state.x);
    state.x_prev_prev.clone_from(&state.x);
    if !params.persist_acceleration {
        state.cheb_n = 0;
        state.omega = 1.0;
    }
    Ok(())
}

/// Iteration `n` (from 1): CCD on the configured cadence, one pass per
/// color, then the Chebyshev blend.
pub fn iterate(
    model: &Model,
    state: &mut SimState,
    params: &SolverParams,
    table: &ConstraintTable,
    n: usize,
) -> Result<(), SolverError> {
    let collide = params.contact.enabled();
    if collide && (n - 1) % params.n_col == 0 {
        ccd_pass(model, state, params);
    }
    for color in 0..model.coloring.num_colors {
        if collide {
            let SimState {
                contacts, x, x_t, ..
            } = &mut *state;
            for c in contacts.contacts.iter_mut() {
                if c.source == DetectionSource::Dcd {
                    recompute_dcd_anchor(c, x, x_t);
                }
            }
        }
        color_pass(model, state, params, table, color, n)?;
    }
    state.cheb_n += 1;
    state.omega = next_omega(params.rho, state.cheb_n, state.omega);
    accelerate(state, state.omega);
    check_finite(state, n)?;
    state.x_prev_prev.clone_from(&state.x_prev);
    state.x_prev.clone_from(&state.x);
    Ok(())
}

/// Velocity update and rotation of the step-start buffers.
pub fn end_step(state: &mut SimState, params: &SolverParams) {
    let h = params.h;
    let v: Vec<Vec3> = state
        .x
        .iter()
        .zip(&state.x_t)
        .map(|(x, xt)| (x - xt) / h)
        .collect();
    state.v_prev = std::mem::replace(&mut state.v_t, v);
    state.x_t.clone_from(&state.x);
    state.step_index += 1;
}

/// One implicit Euler step; `observer` runs after every full iteration.
pub fn step_observed(
    model: &Model,
    state: &mut SimState,
    params: &SolverParams,
    table: &ConstraintTable,
    observer: &mut dyn FnMut(IterationInfo<'_>),
) -> Result<StepStats, SolverError> {
    let start = Instant::now();
    begin_step(model, state, params, table)?;
    for n in 1..=params.n_max {
        iterate(model, state, params, table, n)?;
        observer(IterationInfo {
            iteration: n,
            state,
        });
    }
    let stats = StepStats {
        iterations: params.n_max,
        contact_count: state.contacts.len(),
        max_penetration: state.contacts.max_penetration(&state.x),
        wall: start.elapsed(),
    };
    end_step(state, params);
    Ok(stats)
}
