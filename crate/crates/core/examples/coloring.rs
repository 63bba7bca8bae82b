//! Greedy vertex coloring of tet meshes: vertices of one color share no
//! element and can be solved in parallel.

use vbd::harness::{generate_beam, generate_cube};
use vbd::mesh::{degree_order, greedy_color, VertexAdjacency};

fn main() {
    let meshes = [
        ("beam 20x5x5", generate_beam(20, 5, 5, 0.05)),
        ("cube 10^3", generate_cube(10, 1.0)),
    ];
    for (name, (positions, tets)) in meshes {
        let adj = VertexAdjacency::build(positions.len(), tets.iter());
        let coloring = greedy_color(&adj, &degree_order(&adj));
        println!(
            "{name}: {} vertices, max degree {}, {} colors, sizes {:?}, valid {}",
            positions.len(),
            adj.max_degree(),
            coloring.num_colors,
            coloring.group_sizes(),
            coloring.is_valid_for(&tets)
        );
    }
}
