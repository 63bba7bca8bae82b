//! Closest-point queries on triangles and segments.

use crate::math::Vec3;

/// Closest point on triangle `(a, b, c)` to `p`, as barycentric weights of
/// `a`, `b`, `c` (Ericson, Real-Time Collision Detection 5.1.5).
pub fn closest_point_triangle(p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> [f64; 3] {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return [1.0, 0.0, 0.0];
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return [0.0, 1.0, 0.0];
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return [1.0 - v, v, 0.0];
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return [0.0, 0.0, 1.0];
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return [1.0 - w, 0.0, w];
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return [0.0, 1.0 - w, w];
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    [1.0 - v - w, v, w]
}

pub fn interpolate3(w: &[f64; 3], a: &Vec3, b: &Vec3, c: &Vec3) -> Vec3 {
    w[0] * a + w[1] * b + w[2] * c
}

/// Unnormalized triangle normal `(b - a) x (c - a)`.
pub fn triangle_normal(a: &Vec3, b: &Vec3, c: &Vec3) -> Vec3 {
    (b - a).cross(&(c - a))
}

/// Barycentric coordinates of the projection of `p` onto the plane of the
/// triangle, unclamped. `None` for a degenerate triangle.
pub fn plane_barycentric(p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> Option<[f64; 3]> {
    let n = triangle_normal(a, b, c);
    let nn = n.norm_squared();
    if nn == 0.0 {
        return None;
    }
    let u = triangle_normal(p, b, c).dot(&n) / nn;
    let v = triangle_normal(a, p, c).dot(&n) / nn;
    Some([u, v, 1.0 - u - v])
}

/// Closest points between segments `p0 p1` and `q0 q1`, returned as
/// parameters `(s, t)` clamped to `[0, 1]`.
pub fn closest_segment_params(p0: &Vec3, p1: &Vec3, q0: &Vec3, q1: &Vec3) -> (f64, f64) {
    let d1 = p1 - p0;
    let d2 = q1 - q0;
    let r = p0 - q0;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);
    if a <= f64::EPSILON && e <= f64::EPSILON {
        return (0.0, 0.0);
    }
    if a <= f64::EPSILON {
        return (0.0, (f / e).clamp(0.0, 1.0));
    }
    let c = d1.dot(&r);
    if e <= f64::EPSILON {
        return ((-c / a).clamp(0.0, 1.0), 0.0);
    }
    let b = d1.dot(&d2);
    let denom = a * e - b * b;
    let mut s = if denom > 0.0 {
        ((b * f - c * e) / denom).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let mut t = (b * s + f) / e;
    if t < 0.0 {
        t = 0.0;
        s = (-c / a).clamp(0.0, 1.0);
    } else if t > 1.0 {
        t = 1.0;
        s = ((b - c) / a).clamp(0.0, 1.0);
    }
    (s, t)
}

/// Point-in-tetrahedron test with a small inclusive tolerance on the
/// barycentric coordinates.
pub fn point_in_tet(p: &Vec3, x: [&Vec3; 4], tol: f64) -> bool {
    let m = crate::math::Mat3::from_columns(&[x[1] - x[0], x[2] - x[0], x[3] - x[0]]);
    match crate::math::inverse3(&m) {
        Some(inv) => {
            let w = inv * (p - x[0]);
            w.x >= -tol && w.y >= -tol && w.z >= -tol && w.x + w.y + w.z <= 1.0 + tol
        }
        None => false,
    }
}
