use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use vbd::baselines::Method;
use vbd::harness::{load_scene, run_convergence, run_simulation, HarnessError};
use vbd::mesh::io::load_tet_mesh;
use vbd::mesh::{degree_order, greedy_color};
use vbd::solver::with_threads;

#[derive(Parser)]
#[command(name = "vbd", about = "Vertex block descent elastic body simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scene, writing frames and metrics.csv into --out.
    Simulate {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, env = "VBD_THREADS")]
        threads: Option<usize>,
        /// Overrides the frame count of the scene.
        #[arg(long)]
        frames: Option<usize>,
    },
    /// Compare solvers on the first time step of a scene.
    Converge {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "vbd,vbd-cheb,jacobi,gd,newton")]
        solvers: Vec<String>,
        #[arg(long, default_value_t = 100)]
        iters: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, env = "VBD_THREADS")]
        threads: Option<usize>,
    },
    /// Color a tet mesh and report the partition.
    Color {
        #[arg(long)]
        nodes: PathBuf,
        #[arg(long)]
        eles: PathBuf,
    },
}

fn threaded<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match threads {
        Some(n) if n > 0 => with_threads(n, f),
        _ => f(),
    }
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Simulate {
            scene,
            out,
            threads,
            frames,
        } => {
            let mut scene = load_scene(&scene)?;
            let summary = threaded(threads, || run_simulation(&mut scene, &out, frames))?;
            println!("{summary}");
        }
        Command::Converge {
            scene,
            solvers,
            iters,
            out,
            threads,
        } => {
            let methods = solvers
                .iter()
                .map(|s| s.parse::<Method>())
                .collect::<Result<Vec<_>, _>>()?;
            let scene = load_scene(&scene)?;
            let report = threaded(threads, || run_convergence(&scene, &methods, iters, Some(&out)))?;
            println!("G0 = {}, G* = {}", report.g0, report.g_star);
            for t in &report.traces {
                let last = report.relative_losses(t).last().copied().unwrap_or(f64::NAN);
                println!("{:<10} relative loss after {iters} iterations: {last:.3e}", t.method.name());
            }
        }
        Command::Color { nodes, eles } => {
            let mesh = load_tet_mesh(&nodes, &eles, 1.0).map_err(|e| HarnessError::Value {
                path: format!("{} / {}", nodes.display(), eles.display()),
                message: e.to_string(),
            })?;
            let adj = mesh.incidence();
            let coloring = greedy_color(&adj, &degree_order(&adj));
            println!("num_colors {}", coloring.num_colors);
            for (c, size) in coloring.group_sizes().iter().enumerate() {
                println!("color {c} size {size}");
            }
            println!("valid {}", coloring.is_valid_for(&mesh.tets));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
