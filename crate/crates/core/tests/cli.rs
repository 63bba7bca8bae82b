use std::path::Path;
use std::process::Command;

use vbd::harness::generate_cube;
use vbd::mesh::io::{format_eles, format_nodes};

fn vbd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vbd"))
}

fn scenes() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenes"))
}

#[test]
fn simulate_writes_frames_and_metrics() {
    let out = tempfile::tempdir().unwrap();
    let status = vbd()
        .args(["simulate", "--scene"])
        .arg(scenes().join("pulled_vertex.json"))
        .arg("--out")
        .arg(out.path())
        .args(["--frames", "3", "--threads", "2"])
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    for f in ["metrics.csv", "frame_00000.obj", "frame_00002.obj"] {
        assert!(out.path().join(f).exists(), "{f}");
    }
}

#[test]
fn converge_writes_a_trace_per_solver() {
    let out = tempfile::tempdir().unwrap();
    let csv = out.path().join("trace.csv");
    let status = vbd()
        .args(["converge", "--scene"])
        .arg(scenes().join("beam_release.json"))
        .args(["--solvers", "vbd,gd", "--iters", "5", "--out"])
        .arg(&csv)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().next(), Some("solver,iteration,G,relative_loss,seconds"));
    assert_eq!(text.lines().filter(|l| l.starts_with("vbd,")).count(), 6);
    assert_eq!(text.lines().filter(|l| l.starts_with("gd,")).count(), 6);
}

#[test]
fn color_reports_a_valid_partition() {
    let dir = tempfile::tempdir().unwrap();
    let (p, t) = generate_cube(4, 1.0);
    std::fs::write(dir.path().join("c.node"), format_nodes(&p)).unwrap();
    std::fs::write(dir.path().join("c.ele"), format_eles(&t)).unwrap();
    let out = vbd()
        .arg("color")
        .arg("--nodes")
        .arg(dir.path().join("c.node"))
        .arg("--eles")
        .arg(dir.path().join("c.ele"))
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("num_colors "));
    assert!(text.trim_end().ends_with("valid true"));
}

#[test]
fn bad_inputs_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("bad.json");
    std::fs::write(&scene, r#"{ "objects": [{ "generator": { "type": "cube", "n": 2, "edge": 1 }, "material": { "mu": 1, "lambda": 1 } }],
             "solver": { "h": -1 } }"#).unwrap();
    let out = vbd()
        .args(["simulate", "--scene"])
        .arg(&scene)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("solver.h"));

    let out = vbd()
        .args(["converge", "--scene"])
        .arg(scenes().join("beam_release.json"))
        .args(["--solvers", "vbd,cg", "--out"])
        .arg(dir.path().join("x.csv"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_scene_file_is_an_io_error() {
    let out = vbd()
        .args(["simulate", "--scene", "/nonexistent/scene.json", "--out", "/tmp"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
