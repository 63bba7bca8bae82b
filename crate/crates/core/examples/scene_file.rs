//! Runs any scene file through the harness and writes frames and metrics.
//!
//! cargo run --release --example scene_file -- scenes/pulled_vertex.json out/pulled

use std::path::PathBuf;
use std::process::ExitCode;

use vbd::harness::{load_scene, run_simulation};

fn main() -> ExitCode {
    let mut args = std::env::args().skip(1);
    let scene = args.next().map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenes/pulled_vertex.json")
    });
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("vbd_scene_file"));
    let result = load_scene(&scene).and_then(|mut s| run_simulation(&mut s, &out, None));
    match result {
        Ok(summary) => {
            println!("{summary}");
            println!("output in {}", out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
