use crate::math::Vec3;
use crate::mesh::{edge_matrix, MeshError, Spring, SpringNet};

/// Corner offsets of a hex cell, indexed by `a + 2 b + 4 c`.
const CORNERS: [[usize; 3]; 8] = [
    [0, 0, 0],
    [1, 0, 0],
    [0, 1, 0],
    [1, 1, 0],
    [0, 0, 1],
    [1, 0, 1],
    [0, 1, 1],
    [1, 1, 1],
];

/// Five-tet split of a cell: four corner tets around `000, 110, 101, 011`
/// and the central tet. Odd cells use the mirrored split so neighboring
/// cells share face diagonals.
const EVEN_SPLIT: [[usize; 4]; 5] = [
    [0, 1, 2, 4],
    [3, 1, 2, 7],
    [5, 1, 4, 7],
    [6, 2, 4, 7],
    [1, 2, 4, 7],
];

/// Regular grid of `nx * ny * nz` vertices with spacing `spacing`, starting
/// at the origin, each cell split into five positively oriented tets.
pub fn generate_beam(nx: usize, ny: usize, nz: usize, spacing: f64) -> (Vec<Vec3>, Vec<[usize; 4]>) {
    assert!(nx >= 2 && ny >= 2 && nz >= 2, "a beam needs at least 2 vertices per axis");
    let id = |i: usize, j: usize, k: usize| (i * ny + j) * nz + k;
    let mut positions = Vec::with_capacity(nx * ny * nz);
    for i in 0..nx {
        for j in 0..ny {
            for k in 0..nz {
                positions.push(Vec3::new(i as f64, j as f64, k as f64) * spacing);
            }
        }
    }
    let mut tets = Vec::with_capacity(5 * (nx - 1) * (ny - 1) * (nz - 1));
    for i in 0..nx - 1 {
        for j in 0..ny - 1 {
            for k in 0..nz - 1 {
                let odd = (i + j + k) % 2 == 1;
                let corner = |c: usize| {
                    let [a, b, d] = CORNERS[c];
                    let a = if odd { 1 - a } else { a };
                    id(i + a, j + b, k + d)
                };
                for local in EVEN_SPLIT {
                    let mut t = local.map(corner);
                    if edge_matrix(&positions, &t).determinant() < 0.0 {
                        t.swap(2, 3);
                    }
                    tets.push(t);
                }
            }
        }
    }
    (positions, tets)
}

/// Cube of `n^3` vertices and edge length `edge`.
pub fn generate_cube(n: usize, edge: f64) -> (Vec<Vec3>, Vec<[usize; 4]>) {
    generate_beam(n, n, n, edge / (n - 1) as f64)
}

/// `count` particles hanging down from the origin along `-y`, joined by
/// springs of rest length `spacing`. The last particle is `heavy_end_ratio`
/// times heavier than the others.
pub fn generate_chain(
    count: usize,
    spacing: f64,
    heavy_end_ratio: f64,
    mass: f64,
    stiffness: f64,
) -> Result<SpringNet, MeshError> {
    assert!(count >= 2, "a chain needs at least two particles");
    let particles = (0..count)
        .map(|i| Vec3::new(0.0, -(i as f64) * spacing, 0.0))
        .collect();
    let springs = (0..count - 1)
        .map(|i| Spring {
            i,
            j: i + 1,
            rest_length: spacing,
            stiffness,
        })
        .collect();
    let mut masses = vec![mass; count];
    masses[count - 1] *= heavy_end_ratio;
    SpringNet::new(particles, springs, masses)
}
