//! Scene files, procedural geometry, experiment drivers and output files.

mod generators;
mod output;
mod run;
mod scene;

use std::path::PathBuf;

pub use generators::{generate_beam, generate_chain, generate_cube};
pub use output::{
    bin_bytes, export_frame, frame_file_name, obj_bytes, parse_bin, parse_obj, read_bin, read_obj,
    MetricsRow, MetricsWriter, METRICS_HEADER,
};
pub use run::{run_convergence, run_simulation, ConvergenceReport, RunSummary, CONVERGENCE_HEADER};
pub use scene::{
    build_scene, load_scene, parse_scene, serialize_scene, ConstraintConfig, ContactConfig, Driver,
    FrameFormat, Generator, ObjectConfig, OutputConfig, Region, Scene, SceneConfig, Selection,
    SolverConfig, Stretch, Transform,
};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("schema error at '{path}': {message}")]
    Schema { path: String, message: String },
    #[error("invalid value at '{path}': {message}")]
    Value { path: String, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Solver(crate::solver::SolverError),
    #[error(transparent)]
    Baseline(#[from] crate::baselines::BaselineError),
}

impl HarnessError {
    /// Process exit code: 2 for schema and value errors, 3 for numerical
    /// failures, 1 for IO.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Schema { .. } | HarnessError::Value { .. } => 2,
            HarnessError::Solver(_) => 3,
            HarnessError::Baseline(crate::baselines::BaselineError::UnknownMethod(_)) => 2,
            HarnessError::Baseline(_) => 3,
            HarnessError::Io { .. } => 1,
        }
    }
}
