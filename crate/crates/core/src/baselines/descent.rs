use std::str::FromStr;
use std::time::Instant;

use nalgebra::DVector;
use rayon::prelude::*;

use super::{global_gradient_hessian, BaselineError};
use crate::math::Vec3;
use crate::solver::{
    iterate, local_solve, variational_energy, vertex_gradient, vertex_system, ConstraintTable,
    Model, SimState, SolverError, SolverParams,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Vbd,
    /// VBD with Chebyshev acceleration at the given spectral radius.
    VbdChebyshev(f64),
    BlockJacobi,
    GradientDescent,
    Newton,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Vbd => "vbd",
            Method::VbdChebyshev(_) => "vbd-cheb",
            Method::BlockJacobi => "jacobi",
            Method::GradientDescent => "gd",
            Method::Newton => "newton",
        }
    }
}

impl FromStr for Method {
    type Err = BaselineError;

    /// `vbd-cheb` uses a spectral radius of 0.95 unless written `vbd-cheb:RHO`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s {
            "vbd" => Ok(Method::Vbd),
            "jacobi" => Ok(Method::BlockJacobi),
            "gd" => Ok(Method::GradientDescent),
            "newton" => Ok(Method::Newton),
            "vbd-cheb" => Ok(Method::VbdChebyshev(0.95)),
            _ => s
                .strip_prefix("vbd-cheb:")
                .and_then(|r| r.parse::<f64>().ok())
                .filter(|r| (0.0..1.0).contains(r))
                .map(Method::VbdChebyshev)
                .ok_or_else(|| BaselineError::UnknownMethod(s.to_string())),
        }
    }
}

pub fn gradient_inf_norm(
    model: &Model,
    state: &SimState,
    params: &SolverParams,
    table: &ConstraintTable,
    x: &[Vec3],
) -> f64 {
    (0..x.len())
        .into_par_iter()
        .map(|i| vertex_gradient(model, state, params, table, i, x).amax())
        .collect::<Vec<f64>>()
        .into_iter()
        .fold(0.0, f64::max)
}

/// One Newton iteration on `state.x`: PSD-projected assembly, a dense
/// Cholesky solve (gradient direction if it fails) and a backtracking line
/// search that only accepts steps not increasing `G`. Returns `G` after the
/// step.
pub fn newton_step(
    model: &Model,
    state: &mut SimState,
    params: &SolverParams,
    table: &ConstraintTable,
) -> f64 {
    let sys = global_gradient_hessian(model, state, params, table, &state.x, true);
    let g0 = variational_energy(model, state, params, table, &state.x);
    let neg_grad = -&sys.gradient;
    let dir: DVector<f64> = match sys.to_dense().cholesky() {
        Some(ch) => ch.solve(&neg_grad),
        None => neg_grad,
    };
    let mut alpha = 1.0;
    for _ in 0..60 {
        let trial: Vec<Vec3> = state
            .x
            .iter()
            .enumerate()
            .map(|(i, p)| p + alpha * Vec3::new(dir[3 * i], dir[3 * i + 1], dir[3 * i + 2]))
            .collect();
        let g = variational_energy(model, state, params, table, &trial);
        if g <= g0 {
            state.x = trial;
            return g;
        }
        alpha *= 0.5;
    }
    g0
}

#[derive(Debug, Clone)]
pub struct NewtonConvergence {
    pub positions: Vec<Vec3>,
    pub energy: f64,
    pub gradient_inf: f64,
    pub iterations: usize,
}

/// Newton iterations until `||grad G||_inf < tol`, or until an iteration
/// no longer lowers `G`.
pub fn newton_converge(
    model: &Model,
    state: &SimState,
    params: &SolverParams,
    table: &ConstraintTable,
    tol: f64,
    max_iters: usize,
) -> NewtonConvergence {
    let mut st = state.clone();
    let mut g = variational_energy(model, &st, params, table, &st.x);
    let mut grad = gradient_inf_norm(model, &st, params, table, &st.x);
    let mut iterations = 0;
    let mut stalled = 0;
    while grad >= tol && iterations < max_iters {
        let g_new = newton_step(model, &mut st, params, table);
        iterations += 1;
        grad = gradient_inf_norm(model, &st, params, table, &st.x);
        // Allow a few non-improving steps, since near the minimum G changes
        // by less than its rounding error.
        if g_new >= g {
            stalled += 1;
            if stalled >= 3 {
                break;
            }
        } else {
            stalled = 0;
        }
        g = g.min(g_new);
    }
    NewtonConvergence {
        energy: variational_energy(model, &st, params, table, &st.x),
        positions: st.x,
        gradient_inf: grad,
        iterations,
    }
}

/// Simultaneous-update line search state: the iterate is tested every
/// `interval` iterations and, if `G` rose since the last checkpoint, restored
/// with the step scale reduced by `shrink`.
#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub alpha: f64,
    pub positions: Vec<Vec3>,
    pub energy: f64,
    pub interval: usize,
    /// Step scale factor applied on each backtrack.
    pub shrink: f64,
    pub max_halvings: usize,
    halvings: usize,
}

impl Checkpoint {
    pub fn new(positions: Vec<Vec3>, energy: f64) -> Self {
        Self {
            alpha: 1.0,
            positions,
            energy,
            interval: 8,
            shrink: 0.8,
            max_halvings: 16,
            halvings: 0,
        }
    }

    /// Called after iteration `n`; may rewrite `x`.
    pub fn update(&mut self, n: usize, x: &mut Vec<Vec3>, energy: f64) -> f64 {
        if n % self.interval != 0 {
            return energy;
        }
        if energy > self.energy {
            x.clone_from(&self.positions);
            if self.halvings < self.max_halvings {
                self.alpha *= self.shrink;
                self.halvings += 1;
            }
            self.energy
        } else {
            self.positions.clone_from(x);
            self.energy = energy;
            energy
        }
    }
}

/// Every vertex solves its local system against the same positions; all
/// updates are then applied at once, scaled by `alpha`.
pub fn block_jacobi_step(
    model: &Model,
    state: &mut SimState,
    params: &SolverParams,
    table: &ConstraintTable,
    alpha: f64,
) -> Result<(), SolverError> {
    let st: &SimState = state;
    let dx: Vec<Result<Vec3, SolverError>> = (0..st.x.len())
        .into_par_iter()
        .map(|i| local_solve(model, st, params, table, i))
        .collect();
    let dx: Vec<Vec3> = dx.into_iter().collect::<Result<_, _>>()?;
    for (p, d) in state.x.iter_mut().zip(dx) {
        *p += alpha * d;
    }
    Ok(())
}

/// Gradient descent preconditioned by the diagonal of each vertex's local
/// Hessian; coordinates with a zero diagonal are left alone.
pub fn gd_step(
    model: &Model,
    state: &mut SimState,
    params: &SolverParams,
    table: &ConstraintTable,
    alpha: f64,
) {
    let st: &SimState = state;
    let dx: Vec<Vec3> = (0..st.x.len())
        .into_par_iter()
        .map(|i| {
            if table.fixed[i] {
                return Vec3::zeros();
            }
            let sys = vertex_system(model, st, params, table, i, &st.x);
            let d = Vec3::from_fn(|k, _| {
                let hk = sys.hessian[(k, k)];
                if hk != 0.0 {
                    sys.force[k] / hk
                } else {
                    0.0
                }
            });
            table.project(i, &(st.x[i] + d)) - st.x[i]
        })
        .collect();
    for (p, d) in state.x.iter_mut().zip(dx) {
        *p += alpha * d;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub energy: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct SolverTrace {
    pub method: Method,
    pub rows: Vec<TraceRow>,
    pub positions: Vec<Vec3>,
}

impl SolverTrace {
    pub fn energies(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.energy).collect()
    }
}

/// Runs `iters` iterations of `method` from the prepared step state (inertia
/// target and warm start already computed) and records `G` after each.
/// Row 0 is the starting point.
pub fn run_trace(
    model: &Model,
    prepared: &SimState,
    params: &SolverParams,
    table: &ConstraintTable,
    method: Method,
    iters: usize,
) -> Result<SolverTrace, BaselineError> {
    let mut st = prepared.clone();
    let mut p = params.clone();
    p.rho = match method {
        Method::VbdChebyshev(rho) => rho,
        _ => 0.0,
    };
    let energy = |st: &SimState| variational_energy(model, st, &p, table, &st.x);
    let g0 = energy(&st);
    let mut rows = vec![TraceRow {
        iteration: 0,
        energy: g0,
        seconds: 0.0,
    }];
    let mut ck = Checkpoint::new(st.x.clone(), g0);
    let start = Instant::now();
    for n in 1..=iters {
        let g = match method {
            Method::Vbd | Method::VbdChebyshev(_) => {
                iterate(model, &mut st, &p, table, n)?;
                energy(&st)
            }
            Method::Newton => newton_step(model, &mut st, &p, table),
            Method::BlockJacobi | Method::GradientDescent => {
                if method == Method::BlockJacobi {
                    block_jacobi_step(model, &mut st, &p, table, ck.alpha)?;
                } else {
                    gd_step(model, &mut st, &p, table, ck.alpha);
                }
                let g = energy(&st);
                if !g.is_finite() && n % ck.interval != 0 {
                    // Restore right away rather than carrying NaN to the check.
                    st.x.clone_from(&ck.positions);
                    ck.alpha *= 0.5;
                    ck.energy
                } else {
                    ck.update(n, &mut st.x, g)
                }
            }
        };
        rows.push(TraceRow {
            iteration: n,
            energy: g,
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    Ok(SolverTrace {
        method,
        rows,
        positions: st.x,
    })
}

/// `(G - G*) / (G_0 - G*)` for every entry of `energies`.
pub fn relative_loss(energies: &[f64], g_star: f64, g0: f64) -> Result<Vec<f64>, BaselineError> {
    if !(g0 > g_star) {
        return Err(BaselineError::EmptyDescentRange { g0, g_star });
    }
    Ok(energies.iter().map(|g| (g - g_star) / (g0 - g_star)).collect())
}
