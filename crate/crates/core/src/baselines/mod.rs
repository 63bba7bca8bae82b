//! Reference descent methods on the same variational energy as VBD: global
//! Newton with per-element PSD projection, Block Jacobi and diagonally
//! preconditioned gradient descent, plus relative-loss traces.

mod descent;
mod system;

pub use descent::{
    block_jacobi_step, gd_step, gradient_inf_norm, newton_converge, newton_step, relative_loss,
    run_trace, Checkpoint, Method, NewtonConvergence, SolverTrace, TraceRow,
};
pub use system::{global_gradient_hessian, project_psd, GlobalSystem};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BaselineError {
    #[error("empty descent range: G_0 = {g0} is not above G* = {g_star}")]
    EmptyDescentRange { g0: f64, g_star: f64 },
    #[error("unknown solver '{0}' (expected vbd, vbd-cheb, jacobi, gd or newton)")]
    UnknownMethod(String),
    #[error(transparent)]
    Solver(#[from] crate::solver::SolverError),
}
