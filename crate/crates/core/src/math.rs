//! Small fixed-size linear algebra helpers shared by every module.

use nalgebra::{Matrix3, Vector3};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Skew-symmetric cross-product matrix, `skew(a) * b == a.cross(&b)`.
pub fn skew(a: &Vec3) -> Mat3 {
    Mat3::new(0.0, -a.z, a.y, a.z, 0.0, -a.x, -a.y, a.x, 0.0)
}

/// Cofactor matrix of `f`, i.e. the derivative of `det(f)` with respect to `f`.
pub fn cofactor(f: &Mat3) -> Mat3 {
    let c0 = f.column(0).into_owned();
    let c1 = f.column(1).into_owned();
    let c2 = f.column(2).into_owned();
    Mat3::from_columns(&[c1.cross(&c2), c2.cross(&c0), c0.cross(&c1)])
}

/// Closed-form inverse through the adjugate. Returns `None` when the
/// determinant is exactly zero or non-finite.
pub fn inverse3(m: &Mat3) -> Option<Mat3> {
    let det = m.determinant();
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    Some(cofactor(m).transpose() / det)
}

pub fn is_finite3(v: &Vec3) -> bool {
    v.x.is_finite() && v.y.is_finite() && v.z.is_finite()
}

/// Orthonormal `(t, b)` completing the unit vector `n` to a right-handed frame.
///
/// The seed axis is the coordinate axis where `n` has its smallest magnitude,
/// so the cross product never degenerates.
pub fn tangent_frame(n: &Vec3) -> (Vec3, Vec3) {
    let a = n.abs();
    let seed = if a.x <= a.y && a.x <= a.z {
        Vec3::x()
    } else if a.y <= a.z {
        Vec3::y()
    } else {
        Vec3::z()
    };
    let t = n.cross(&seed).normalize();
    let b = n.cross(&t);
    (t, b)
}
