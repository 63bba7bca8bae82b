use super::Contact;
use crate::materials::ElementDerivatives;
use crate::math::Vec3;

/// `E_c = k_c d^2 / 2` with the normal and barycentric weights held fixed.
pub fn contact_energy(contact: &Contact, positions: &[Vec3]) -> f64 {
    let d = contact.depth(positions);
    0.5 * contact.stiffness * d * d
}

/// Magnitude `k_c d` of the normal contact force.
pub fn normal_force(contact: &Contact, positions: &[Vec3]) -> f64 {
    contact.stiffness * contact.depth(positions)
}

pub fn contact_derivatives(contact: &Contact, positions: &[Vec3], vertex: usize) -> ElementDerivatives {
    let slot = contact
        .slot_of(vertex)
        .expect("vertex does not belong to the contact");
    let d = contact.depth(positions);
    if d <= 0.0 {
        return ElementDerivatives::zero();
    }
    let k = contact.stiffness;
    let c = contact.coeff(slot);
    let n = contact.normal;
    ElementDerivatives {
        energy: 0.5 * k * d * d,
        force: -k * d * c * n,
        hessian: k * c * c * (n * n.transpose()),
    }
}
