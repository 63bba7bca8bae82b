use rayon::prelude::*;

use super::broad_phase::aabb;
use super::geometry::{closest_point_triangle, interpolate3, point_in_tet, triangle_normal};
use super::{CollisionMesh, Contact, ContactKind, DetectionSource, SpatialHash};
use crate::math::Vec3;

/// Vertex-triangle discrete test on caller-selected pairs `(vertex,
/// triangle)`. A contact is reported when the vertex lies within `radius`
/// of the triangle or behind its plane; `x_a` is the vertex, `x_b` the
/// closest point and the normal is the triangle normal. Anchors are taken
/// from `positions`, which are expected to be the step-start state.
pub fn dcd_vertex_triangle(
    positions: &[Vec3],
    pairs: &[(usize, [usize; 3])],
    radius: f64,
    stiffness: f64,
) -> Vec<Contact> {
    pairs
        .iter()
        .filter_map(|&(v, t)| {
            let (p, a, b, c) = (&positions[v], &positions[t[0]], &positions[t[1]], &positions[t[2]]);
            let n = triangle_normal(a, b, c);
            let nn = n.norm();
            if nn == 0.0 {
                return None;
            }
            let n = n / nn;
            let w = closest_point_triangle(p, a, b, c);
            let q = interpolate3(&w, a, b, c);
            let height = (p - a).dot(&n);
            if (p - q).norm() > radius && height >= 0.0 {
                return None;
            }
            Some(Contact::new(
                ContactKind::VertexTriangle,
                DetectionSource::Dcd,
                [v, t[0], t[1], t[2]],
                [1.0, w[0], w[1], w[2]],
                n,
                stiffness,
                positions,
            ))
        })
        .collect()
}

fn distance_to_triangle(p: &Vec3, t: [usize; 3], x: &[Vec3]) -> (f64, f64) {
    let (a, b, c) = (&x[t[0]], &x[t[1]], &x[t[2]]);
    let w = closest_point_triangle(p, a, b, c);
    let q = interpolate3(&w, a, b, c);
    let n = triangle_normal(a, b, c);
    let nn = n.norm();
    let height = if nn > 0.0 { (p - a).dot(&n) / nn } else { 0.0 };
    ((p - q).norm(), height)
}

/// Scene-level discrete detection at the step start. Surface vertices found
/// inside a tetrahedron of another body are paired with that body's closest
/// surface triangle; with `radius > 0` vertices in front of another body's
/// surface within `radius` are paired as well.
pub fn detect_penetrations(
    positions: &[Vec3],
    mesh: &CollisionMesh,
    radius: f64,
    stiffness: f64,
) -> Vec<Contact> {
    let mut tet_hash = SpatialHash::new(mesh.cell_size);
    for (i, t) in mesh.tets.iter().enumerate() {
        let (lo, hi) = aabb(t.iter().map(|&v| &positions[v]), 0.0);
        tet_hash.insert(i as u32, &lo, &hi);
    }
    let mut tri_hash = SpatialHash::new(mesh.cell_size);
    for (i, t) in mesh.triangles.iter().enumerate() {
        let (lo, hi) = aabb(t.iter().map(|&v| &positions[v]), 0.0);
        tri_hash.insert(i as u32, &lo, &hi);
    }
    let (scene_lo, scene_hi) = aabb(positions.iter(), 0.0);
    let max_radius = (scene_hi - scene_lo).norm().max(mesh.cell_size);

    let pairs: Vec<(usize, [usize; 3])> = mesh
        .surface_vertices
        .par_iter()
        .map(|&v| {
            let p = positions[v];
            let body = mesh.vertex_body[v];
            let mut ids = Vec::new();
            tet_hash.query(&p, &p, &mut ids);
            let mut inside: Vec<usize> = ids
                .iter()
                .map(|&t| t as usize)
                .filter(|&t| mesh.tet_body[t] != body)
                .filter(|&t| {
                    let tet = mesh.tets[t];
                    point_in_tet(&p, tet.map(|i| &positions[i]), 0.0)
                })
                .map(|t| mesh.tet_body[t])
                .collect();
            inside.sort_unstable();
            inside.dedup();

            let mut out = Vec::new();
            let usable = |t: usize| {
                let tri = mesh.triangles[t];
                !tri.contains(&v) && !(mesh.fixed[v] && tri.iter().all(|&i| mesh.fixed[i]))
            };
            for &other in &inside {
                let mut r = mesh.cell_size;
                loop {
                    tri_hash.query(&(p.add_scalar(-r)), &(p.add_scalar(r)), &mut ids);
                    let best = ids
                        .iter()
                        .map(|&t| t as usize)
                        .filter(|&t| mesh.triangle_body[t] == other && usable(t))
                        .map(|t| (distance_to_triangle(&p, mesh.triangles[t], positions).0, t))
                        .min_by(|a, b| a.0.total_cmp(&b.0));
                    match best {
                        Some((d, t)) if d <= r => {
                            out.push((v, mesh.triangles[t]));
                            break;
                        }
                        _ if r > max_radius => break,
                        _ => r *= 2.0,
                    }
                }
            }
            if radius > 0.0 {
                tri_hash.query(&(p.add_scalar(-radius)), &(p.add_scalar(radius)), &mut ids);
                let mut near: Vec<(usize, f64, usize)> = ids
                    .iter()
                    .map(|&t| t as usize)
                    .filter(|&t| {
                        let b = mesh.triangle_body[t];
                        b != body && !inside.contains(&b) && usable(t)
                    })
                    .filter_map(|t| {
                        let (d, height) = distance_to_triangle(&p, mesh.triangles[t], positions);
                        (d <= radius && height >= 0.0).then_some((mesh.triangle_body[t], d, t))
                    })
                    .collect();
                near.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));
                near.dedup_by_key(|e| e.0);
                out.extend(near.into_iter().map(|(_, _, t)| (v, mesh.triangles[t])));
            }
            out
        })
        .flatten()
        .collect();
    dcd_vertex_triangle(positions, &pairs, f64::INFINITY, stiffness)
}

/// Re-projects the vertex of a DCD contact onto its triangle at `positions`,
/// keeping the normal. Anchors are re-evaluated at `step_start` with the new
/// weights.
pub fn recompute_dcd_anchor(contact: &mut Contact, positions: &[Vec3], step_start: &[Vec3]) {
    if contact.kind != ContactKind::VertexTriangle {
        return;
    }
    let [v, a, b, c] = contact.indices;
    let w = closest_point_triangle(&positions[v], &positions[a], &positions[b], &positions[c]);
    contact.bary = [1.0, w[0], w[1], w[2]];
    contact.refresh_anchors(step_start);
}
