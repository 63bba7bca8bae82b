//! Frame files and the metrics CSV.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::scene::FrameFormat;
use super::HarnessError;
use crate::math::Vec3;

pub const METRICS_HEADER: &str = "step,iteration,G,relative_loss,contact_count,max_penetration,wall_ms";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// File name of frame `index` in the given format, without directory.
pub fn frame_file_name(index: usize, format: FrameFormat) -> Option<String> {
    match format {
        FrameFormat::Obj => Some(format!("frame_{index:05}.obj")),
        FrameFormat::Bin => Some(format!("frame_{index:05}.bin")),
        FrameFormat::None => None,
    }
}

/// Writes `positions` with the `surface` triangles. `obj` is text with
/// 1-based face indices; `bin` is a little-endian `u32` vertex count followed
/// by three `f64` per vertex and ignores `surface`.
pub fn export_frame(
    positions: &[Vec3],
    surface: &[[usize; 3]],
    path: &Path,
    format: FrameFormat,
) -> Result<(), HarnessError> {
    let bytes = match format {
        FrameFormat::Obj => obj_bytes(positions, surface),
        FrameFormat::Bin => bin_bytes(positions),
        FrameFormat::None => return Ok(()),
    };
    std::fs::write(path, bytes).map_err(io_err(path))
}

pub fn obj_bytes(positions: &[Vec3], surface: &[[usize; 3]]) -> Vec<u8> {
    let mut s = String::with_capacity(40 * positions.len() + 20 * surface.len());
    for p in positions {
        s.push_str(&format!("v {} {} {}\n", p.x, p.y, p.z));
    }
    for t in surface {
        s.push_str(&format!("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1));
    }
    s.into_bytes()
}

pub fn bin_bytes(positions: &[Vec3]) -> Vec<u8> {
    let count = u32::try_from(positions.len()).expect("vertex count fits in u32");
    let mut out = Vec::with_capacity(4 + 24 * positions.len());
    out.extend_from_slice(&count.to_le_bytes());
    for p in positions {
        for c in p.iter() {
            out.extend_from_slice(&c.to_le_bytes());
        }
    }
    out
}

/// Reads the `v` and triangular `f` lines of an obj file written by
/// [`export_frame`]; faces come back 0-based.
pub fn read_obj(path: &Path) -> Result<(Vec<Vec3>, Vec<[usize; 3]>), HarnessError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    parse_obj(&text).map_err(|message| HarnessError::Value {
        path: path.display().to_string(),
        message,
    })
}

pub fn parse_obj(text: &str) -> Result<(Vec<Vec3>, Vec<[usize; 3]>), String> {
    let mut positions = Vec::new();
    let mut faces = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        let bad = || format!("line {}: malformed '{line}'", line_no + 1);
        match it.next() {
            Some("v") => {
                let c: Vec<f64> = it.map(|t| t.parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
                if c.len() != 3 {
                    return Err(bad());
                }
                positions.push(Vec3::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let ids: Vec<usize> = it
                    .map(|t| {
                        let head = t.split('/').next().unwrap_or("");
                        head.parse::<usize>().ok().filter(|&i| i >= 1).ok_or_else(bad)
                    })
                    .collect::<Result<_, _>>()?;
                if ids.len() != 3 {
                    return Err(bad());
                }
                faces.push([ids[0] - 1, ids[1] - 1, ids[2] - 1]);
            }
            _ => {}
        }
    }
    if let Some(f) = faces.iter().find(|f| f.iter().any(|&i| i >= positions.len())) {
        return Err(format!("face {f:?} references a missing vertex"));
    }
    Ok((positions, faces))
}

pub fn read_bin(path: &Path) -> Result<Vec<Vec3>, HarnessError> {
    let bytes = std::fs::read(path).map_err(io_err(path))?;
    parse_bin(&bytes).map_err(|message| HarnessError::Value {
        path: path.display().to_string(),
        message,
    })
}

pub fn parse_bin(bytes: &[u8]) -> Result<Vec<Vec3>, String> {
    let head: [u8; 4] = bytes
        .get(..4)
        .and_then(|b| b.try_into().ok())
        .ok_or("missing vertex count")?;
    let n = u32::from_le_bytes(head) as usize;
    if bytes.len() != 4 + 24 * n {
        return Err(format!("expected {} bytes for {n} vertices, found {}", 4 + 24 * n, bytes.len()));
    }
    Ok(bytes[4..]
        .chunks_exact(24)
        .map(|c| {
            let f = |k: usize| f64::from_le_bytes(c[8 * k..8 * k + 8].try_into().expect("8 bytes"));
            Vec3::new(f(0), f(1), f(2))
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRow {
    pub step: usize,
    pub iteration: usize,
    pub energy: f64,
    pub relative_loss: Option<f64>,
    pub contact_count: usize,
    pub max_penetration: f64,
    pub wall_ms: f64,
}

impl MetricsRow {
    pub fn to_csv(&self) -> String {
        let rl = self.relative_loss.map(|r| r.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{}",
            self.step,
            self.iteration,
            self.energy,
            rl,
            self.contact_count,
            self.max_penetration,
            self.wall_ms
        )
    }
}

/// Buffered metrics CSV; the header is written on creation.
pub struct MetricsWriter {
    path: PathBuf,
    out: BufWriter<File>,
}

impl MetricsWriter {
    pub fn create(path: &Path) -> Result<Self, HarnessError> {
        let file = File::create(path).map_err(io_err(path))?;
        let mut w = Self {
            path: path.to_path_buf(),
            out: BufWriter::new(file),
        };
        w.line(METRICS_HEADER)?;
        Ok(w)
    }

    fn line(&mut self, s: &str) -> Result<(), HarnessError> {
        writeln!(self.out, "{s}").map_err(io_err(&self.path))
    }

    pub fn push(&mut self, row: &MetricsRow) -> Result<(), HarnessError> {
        self.line(&row.to_csv())
    }

    pub fn flush(&mut self) -> Result<(), HarnessError> {
        self.out.flush().map_err(io_err(&self.path))
    }
}
