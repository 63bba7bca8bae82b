//! Continuous collision detection under linear motion over the step.
//!
//! Four moving points are coplanar at the roots of a cubic in `t`; each root
//! in `[0, 1]` is then checked for containment (inside the triangle, or
//! within both edge segments).

use rayon::prelude::*;

use super::geometry::plane_barycentric;
use super::{Contact, ContactKind, DetectionSource};
use crate::math::Vec3;

const CONTAINMENT_TOL: f64 = 1e-8;
const PARALLEL_TOL: f64 = 1e-9;

/// Coefficients `[c0, c1, c2, c3]` of `((b - a) x (c - a)) . (p - a)` as a
/// polynomial in `t`, every point moving linearly from `x0` to `x1`.
pub fn coplanarity_cubic(a: [Vec3; 2], b: [Vec3; 2], c: [Vec3; 2], p: [Vec3; 2]) -> [f64; 4] {
    let (a0, a1) = (b[0] - a[0], (b[1] - b[0]) - (a[1] - a[0]));
    let (b0, b1) = (c[0] - a[0], (c[1] - c[0]) - (a[1] - a[0]));
    let (c0, c1) = (p[0] - a[0], (p[1] - p[0]) - (a[1] - a[0]));
    let n0 = a0.cross(&b0);
    let n1 = a0.cross(&b1) + a1.cross(&b0);
    let n2 = a1.cross(&b1);
    [
        n0.dot(&c0),
        n0.dot(&c1) + n1.dot(&c0),
        n1.dot(&c1) + n2.dot(&c0),
        n2.dot(&c1),
    ]
}

fn horner(c: &[f64; 4], t: f64) -> f64 {
    ((c[3] * t + c[2]) * t + c[1]) * t + c[0]
}

/// Roots of the cubic in `[0, 1]`, ascending. Monotone pieces are split at
/// the critical points and each sign change is bisected to full precision.
/// An identically vanishing polynomial yields no roots.
fn unit_roots(c: &[f64; 4], zero_tol: f64) -> Vec<f64> {
    if c.iter().all(|&x| x.abs() <= zero_tol) {
        return Vec::new();
    }
    let mut breaks = vec![0.0];
    // Derivative 3 c3 t^2 + 2 c2 t + c1.
    let (qa, qb, qc) = (3.0 * c[3], 2.0 * c[2], c[1]);
    let mut crit = Vec::new();
    if qa.abs() > 0.0 {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let s = disc.sqrt();
            let q = -0.5 * (qb + qb.signum() * s);
            if q != 0.0 {
                crit.push(q / qa);
                crit.push(qc / q);
            } else {
                crit.push(0.0);
            }
        }
    } else if qb != 0.0 {
        crit.push(-qc / qb);
    }
    crit.retain(|t| *t > 0.0 && *t < 1.0);
    crit.sort_by(f64::total_cmp);
    breaks.extend(crit);
    breaks.push(1.0);

    let mut roots: Vec<f64> = Vec::new();
    let push = |roots: &mut Vec<f64>, t: f64| {
        if roots.last().map_or(true, |&r| t - r > 1e-12) {
            roots.push(t);
        }
    };
    for w in breaks.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (flo, fhi) = (horner(c, lo), horner(c, hi));
        if flo.abs() <= zero_tol {
            push(&mut roots, lo);
            continue;
        }
        if fhi.abs() <= zero_tol {
            push(&mut roots, hi);
            continue;
        }
        if (flo < 0.0) == (fhi < 0.0) {
            continue;
        }
        let lo_neg = flo < 0.0;
        for _ in 0..200 {
            if hi - lo <= 1e-13 {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if (horner(c, mid) < 0.0) == lo_neg {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        push(&mut roots, 0.5 * (lo + hi));
    }
    roots
}

fn lerp(x: &[Vec3; 2], t: f64) -> Vec3 {
    x[0] + t * (x[1] - x[0])
}

fn length_scale(pts: &[[Vec3; 2]]) -> f64 {
    let (mut lo, mut hi) = (pts[0][0], pts[0][0]);
    for p in pts.iter().flatten() {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (hi - lo).norm()
}

fn zero_tol(pts: &[[Vec3; 2]]) -> f64 {
    1e-14 * length_scale(pts).powi(3)
}

/// Earliest time in `[0, 1]` at which point `p` lies on triangle `(a, b, c)`
/// with its barycentric weights of `a`, `b`, `c` at that time.
pub fn vertex_triangle_toi(
    p: [Vec3; 2],
    a: [Vec3; 2],
    b: [Vec3; 2],
    c: [Vec3; 2],
) -> Option<(f64, [f64; 3])> {
    let tol = zero_tol(&[p, a, b, c]);
    let cubic = coplanarity_cubic(a, b, c, p);
    unit_roots(&cubic, tol).into_iter().find_map(|t| {
        let w = plane_barycentric(&lerp(&p, t), &lerp(&a, t), &lerp(&b, t), &lerp(&c, t))?;
        if w.iter().all(|&x| x >= -CONTAINMENT_TOL) {
            let w = w.map(|x| x.max(0.0));
            let s: f64 = w.iter().sum();
            Some((t, w.map(|x| x / s)))
        } else {
            None
        }
    })
}

/// Earliest time in `[0, 1]` at which segments `ea` and `eb` intersect, with
/// the parameters `s`, `u` of the intersection point along each. Nearly
/// parallel configurations are skipped.
pub fn edge_edge_toi(ea: [[Vec3; 2]; 2], eb: [[Vec3; 2]; 2]) -> Option<(f64, f64, f64)> {
    let tol = zero_tol(&[ea[0], ea[1], eb[0], eb[1]]);
    let cubic = coplanarity_cubic(ea[0], ea[1], eb[0], eb[1]);
    unit_roots(&cubic, tol).into_iter().find_map(|t| {
        let (a0, a1) = (lerp(&ea[0], t), lerp(&ea[1], t));
        let (b0, b1) = (lerp(&eb[0], t), lerp(&eb[1], t));
        let (da, db) = (a1 - a0, b1 - b0);
        let cr = da.cross(&db);
        let cn2 = cr.norm_squared();
        if cn2.sqrt() < PARALLEL_TOL * da.norm() * db.norm() || cn2 == 0.0 {
            return None;
        }
        let r = b0 - a0;
        let s = r.cross(&db).dot(&cr) / cn2;
        let u = r.cross(&da).dot(&cr) / cn2;
        let inside = |x: f64| (-CONTAINMENT_TOL..=1.0 + CONTAINMENT_TOL).contains(&x);
        (inside(s) && inside(u)).then(|| (t, s.clamp(0.0, 1.0), u.clamp(0.0, 1.0)))
    })
}

fn pair(x0: &[Vec3], x1: &[Vec3], i: usize) -> [Vec3; 2] {
    [x0[i], x1[i]]
}

/// CCD contacts for `(vertex, triangle)` pairs swept from `start` to `end`.
/// The normal is the triangle normal at impact, pointing to the side the
/// vertex came from.
pub fn ccd_vertex_triangle(
    start: &[Vec3],
    end: &[Vec3],
    pairs: &[(usize, [usize; 3])],
    stiffness: f64,
) -> Vec<Contact> {
    pairs
        .par_iter()
        .filter_map(|&(v, t)| {
            let (p, a, b, c) = (
                pair(start, end, v),
                pair(start, end, t[0]),
                pair(start, end, t[1]),
                pair(start, end, t[2]),
            );
            let (toi, w) = vertex_triangle_toi(p, a, b, c)?;
            let (pa, pb, pc) = (lerp(&a, toi), lerp(&b, toi), lerp(&c, toi));
            let n = (pb - pa).cross(&(pc - pa));
            if n.norm() == 0.0 {
                return None;
            }
            let n = n.normalize();
            let tol = zero_tol(&[p, a, b, c]);
            let cubic = coplanarity_cubic(a, b, c, p);
            let side = if cubic[0].abs() > tol {
                cubic[0].signum()
            } else {
                let f1: f64 = cubic.iter().sum();
                if f1 == 0.0 {
                    return None;
                }
                -f1.signum()
            };
            let mut contact = Contact::new(
                ContactKind::VertexTriangle,
                DetectionSource::Ccd,
                [v, t[0], t[1], t[2]],
                [1.0, w[0], w[1], w[2]],
                side * n,
                stiffness,
                start,
            );
            contact.toi = toi;
            Some(contact)
        })
        .collect()
}

/// CCD contacts for edge pairs. The normal is `e_a x e_b` at impact,
/// oriented so that the separation `(x_b - x_a) . n` is negative at the start.
pub fn ccd_edge_edge(
    start: &[Vec3],
    end: &[Vec3],
    pairs: &[([usize; 2], [usize; 2])],
    stiffness: f64,
) -> Vec<Contact> {
    pairs
        .par_iter()
        .filter_map(|&(ea, eb)| {
            let a = [pair(start, end, ea[0]), pair(start, end, ea[1])];
            let b = [pair(start, end, eb[0]), pair(start, end, eb[1])];
            let (toi, s, u) = edge_edge_toi(a, b)?;
            let n = (lerp(&a[1], toi) - lerp(&a[0], toi))
                .cross(&(lerp(&b[1], toi) - lerp(&b[0], toi)))
                .normalize();
            let sep = |x: usize| {
                let xa = (1.0 - s) * a[0][x] + s * a[1][x];
                let xb = (1.0 - u) * b[0][x] + u * b[1][x];
                (xb - xa).dot(&n)
            };
            let tol = 1e-12 * length_scale(&[a[0], a[1], b[0], b[1]]);
            let (s0, s1) = (sep(0), sep(1));
            let sign = if s0.abs() > tol {
                -s0.signum()
            } else if s1 != 0.0 {
                s1.signum()
            } else {
                return None;
            };
            let mut contact = Contact::new(
                ContactKind::EdgeEdge,
                DetectionSource::Ccd,
                [ea[0], ea[1], eb[0], eb[1]],
                [1.0 - s, s, 1.0 - u, u],
                sign * n,
                stiffness,
                start,
            );
            contact.toi = toi;
            Some(contact)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn still(p: Vec3) -> [Vec3; 2] {
        [p, p]
    }

    #[test]
    fn cubic_matches_direct_evaluation() {
        let a = [Vec3::new(0.1, 0.2, 0.3), Vec3::new(0.4, -0.1, 0.0)];
        let b = [Vec3::new(1.0, 0.0, 0.2), Vec3::new(0.9, 0.5, 0.1)];
        let c = [Vec3::new(0.0, 1.0, -0.3), Vec3::new(0.2, 1.1, 0.6)];
        let p = [Vec3::new(0.3, 0.3, 1.0), Vec3::new(0.2, 0.1, -1.0)];
        let k = coplanarity_cubic(a, b, c, p);
        for t in [0.0, 0.25, 0.7, 1.0] {
            let (at, bt, ct, pt) = (lerp(&a, t), lerp(&b, t), lerp(&c, t), lerp(&p, t));
            let direct = (bt - at).cross(&(ct - at)).dot(&(pt - at));
            assert!((horner(&k, t) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn roots_of_known_cubic() {
        // (t - 0.2)(t - 0.5)(t - 0.9)
        let c = [-0.09, 0.73, -1.6, 1.0];
        let r = unit_roots(&c, 0.0);
        assert_eq!(r.len(), 3);
        for (x, e) in r.iter().zip([0.2, 0.5, 0.9]) {
            assert!((x - e).abs() < 1e-12);
        }
    }

    #[test]
    fn falling_vertex_hits_at_expected_time() {
        let p = [Vec3::new(0.2, 1.0, 0.2), Vec3::new(0.2, -3.0, 0.2)];
        let hit = vertex_triangle_toi(
            p,
            still(Vec3::zeros()),
            still(Vec3::new(0.0, 0.0, 1.0)),
            still(Vec3::new(1.0, 0.0, 0.0)),
        )
        .unwrap();
        assert!((hit.0 - 0.25).abs() < 1e-12);
        assert!((hit.1[0] - 0.6).abs() < 1e-9);

        let x0 = vec![p[0], Vec3::zeros(), Vec3::new(0.0, 0.0, 1.0), Vec3::new(1.0, 0.0, 0.0)];
        let mut x1 = x0.clone();
        x1[0] = p[1];
        let c = ccd_vertex_triangle(&x0, &x1, &[(0, [1, 2, 3])], 1.0);
        assert_eq!(c.len(), 1);
        assert!(c[0].normal.y > 0.99);
        assert!(c[0].signed_depth(&x0) < 0.0 && c[0].signed_depth(&x1) > 0.0);
    }

    #[test]
    fn miss_outside_triangle() {
        let p = [Vec3::new(2.0, 1.0, 2.0), Vec3::new(2.0, -1.0, 2.0)];
        let r = vertex_triangle_toi(
            p,
            still(Vec3::zeros()),
            still(Vec3::new(0.0, 0.0, 1.0)),
            still(Vec3::new(1.0, 0.0, 0.0)),
        );
        assert!(r.is_none());
    }

    #[test]
    fn coplanar_motion_is_ignored() {
        let p = [Vec3::new(0.2, 0.0, 0.2), Vec3::new(0.3, 0.0, 0.1)];
        let r = vertex_triangle_toi(
            p,
            still(Vec3::zeros()),
            still(Vec3::new(0.0, 0.0, 1.0)),
            still(Vec3::new(1.0, 0.0, 0.0)),
        );
        assert!(r.is_none());
    }

    #[test]
    fn crossing_edges() {
        let ea = [still(Vec3::new(-1.0, 0.0, 0.0)), still(Vec3::new(1.0, 0.0, 0.0))];
        let eb = [
            [Vec3::new(0.5, 1.0, -1.0), Vec3::new(0.5, -1.0, -1.0)],
            [Vec3::new(0.5, 1.0, 1.0), Vec3::new(0.5, -1.0, 1.0)],
        ];
        let (t, s, u) = edge_edge_toi(ea, eb).unwrap();
        assert!((t - 0.5).abs() < 1e-12);
        assert!((s - 0.75).abs() < 1e-9 && (u - 0.5).abs() < 1e-9);

        let x0 = vec![ea[0][0], ea[1][0], eb[0][0], eb[1][0]];
        let x1 = vec![ea[0][1], ea[1][1], eb[0][1], eb[1][1]];
        let c = ccd_edge_edge(&x0, &x1, &[([0, 1], [2, 3])], 1.0);
        assert_eq!(c.len(), 1);
        assert!(c[0].signed_depth(&x0) < 0.0 && c[0].signed_depth(&x1) > 0.0);
    }

    #[test]
    fn parallel_edges_are_skipped() {
        let ea = [still(Vec3::new(0.0, 0.0, 0.0)), still(Vec3::new(1.0, 0.0, 0.0))];
        let eb = [
            [Vec3::new(0.0, 1.0, 0.0), Vec3::new(0.0, -1.0, 0.0)],
            [Vec3::new(1.0, 1.0, 0.0), Vec3::new(1.0, -1.0, 0.0)],
        ];
        assert!(edge_edge_toi(ea, eb).is_none());
    }
}
