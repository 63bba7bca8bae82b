//! Plain-text `.node` / `.ele` tet mesh files.
//!
//! `.node`: one `index x y z` line per vertex. `.ele`: one `index v0 v1 v2 v3`
//! line per tet. Indices are 0-based and must be sequential. Blank lines and
//! lines starting with `#` are ignored. A TetGen-style count header
//! (`count dim attrs markers`) on the first line is tolerated.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::{build_tet_mesh, MeshError, TetMesh};
use crate::math::Vec3;

#[derive(Debug, Error)]
pub enum MeshIoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim();
        (!l.is_empty() && !l.starts_with('#')).then(|| (i + 1, l.split_whitespace().collect()))
    })
}

fn parse_table<T: std::str::FromStr>(
    text: &str,
    path: &Path,
    width: usize,
) -> Result<Vec<Vec<T>>, MeshIoError> {
    let err = |line, message: String| MeshIoError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut rows = Vec::new();
    let mut first = true;
    for (line, tokens) in records(text) {
        if first {
            first = false;
            // TetGen header: count, then a dimension/arity field, no index 0.
            if tokens.first() != Some(&"0") && tokens.len() <= 4 {
                continue;
            }
        }
        if tokens.len() < width + 1 {
            return Err(err(line, format!("expected {} fields", width + 1)));
        }
        let index: usize = tokens[0]
            .parse()
            .map_err(|_| err(line, format!("bad index {:?}", tokens[0])))?;
        if index != rows.len() {
            return Err(err(line, format!("expected index {}, got {index}", rows.len())));
        }
        let row = tokens[1..=width]
            .iter()
            .map(|t| t.parse::<T>().map_err(|_| err(line, format!("bad value {t:?}"))))
            .collect::<Result<Vec<T>, _>>()?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn parse_nodes(text: &str, path: &Path) -> Result<Vec<Vec3>, MeshIoError> {
    let rows = parse_table::<f64>(text, path, 3)?;
    Ok(rows.into_iter().map(|r| Vec3::new(r[0], r[1], r[2])).collect())
}

pub fn parse_eles(text: &str, path: &Path) -> Result<Vec<[usize; 4]>, MeshIoError> {
    let rows = parse_table::<usize>(text, path, 4)?;
    Ok(rows.into_iter().map(|r| [r[0], r[1], r[2], r[3]]).collect())
}

fn read(path: &Path) -> Result<String, MeshIoError> {
    std::fs::read_to_string(path).map_err(|source| MeshIoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_nodes(path: &Path) -> Result<Vec<Vec3>, MeshIoError> {
    parse_nodes(&read(path)?, path)
}

pub fn read_eles(path: &Path) -> Result<Vec<[usize; 4]>, MeshIoError> {
    parse_eles(&read(path)?, path)
}

pub fn load_tet_mesh(nodes: &Path, eles: &Path, density: f64) -> Result<TetMesh, MeshIoError> {
    Ok(build_tet_mesh(read_nodes(nodes)?, read_eles(eles)?, density)?)
}

pub fn format_nodes(positions: &[Vec3]) -> String {
    let mut s = String::new();
    for (i, p) in positions.iter().enumerate() {
        // `{:?}` keeps the shortest round-trip representation of an f64.
        let _ = writeln!(s, "{i} {:?} {:?} {:?}", p.x, p.y, p.z);
    }
    s
}

pub fn format_eles(tets: &[[usize; 4]]) -> String {
    let mut s = String::new();
    for (i, t) in tets.iter().enumerate() {
        let _ = writeln!(s, "{i} {} {} {} {}", t[0], t[1], t[2], t[3]);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_text() {
        let p = vec![Vec3::new(0.1, -2.5, 3.0), Vec3::new(1e-17, 0.0, 7.25)];
        let parsed = parse_nodes(&format_nodes(&p), Path::new("x.node")).unwrap();
        assert_eq!(parsed, p);
        let t = vec![[0, 1, 2, 3], [4, 5, 6, 7]];
        assert_eq!(parse_eles(&format_eles(&t), Path::new("x.ele")).unwrap(), t);
    }

    #[test]
    fn comments_and_header_are_skipped() {
        let text = "# generated\n2 3 0 0\n0 0 0 0\n\n1 1 0 0\n";
        let p = parse_nodes(text, Path::new("a.node")).unwrap();
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_nodes("0 0 0 0\n1 0 zero 0\n", Path::new("a.node")).unwrap_err();
        match err {
            MeshIoError::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e}"),
        }
        assert!(parse_eles("0 1 2 3 4\n5 0 1 2 3\n", Path::new("a.ele")).is_err());
    }
}
