use crate::math::{Mat3, Vec3};

#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintKind {
    /// The vertex follows its step-start velocity and is never solved for.
    Fixed,
    /// The vertex moves on `anchor + span(basis)`; the basis has one or two
    /// orthonormal columns.
    Subspace { basis: Vec<Vec3>, anchor: Vec3 },
    /// Quadratic penalty `k_b d^2 / 2` on the distance `d` outside the box.
    WorldBox { min: Vec3, max: Vec3, stiffness: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub vertex: usize,
    pub kind: ConstraintKind,
}

impl Constraint {
    pub fn fixed(vertex: usize) -> Self {
        Self {
            vertex,
            kind: ConstraintKind::Fixed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldBox {
    pub min: Vec3,
    pub max: Vec3,
    pub stiffness: f64,
}

impl WorldBox {
    /// Energy, force and Hessian of the penalty at `x`.
    pub fn derivatives(&self, x: &Vec3) -> (f64, Vec3, Mat3) {
        let mut e = 0.0;
        let mut f = Vec3::zeros();
        let mut h = Mat3::zeros();
        for a in 0..3 {
            // Outward normal of the violated face is -e_a below, +e_a above.
            let (d, sign) = if x[a] < self.min[a] {
                (self.min[a] - x[a], 1.0)
            } else if x[a] > self.max[a] {
                (x[a] - self.max[a], -1.0)
            } else {
                continue;
            };
            e += 0.5 * self.stiffness * d * d;
            f[a] += sign * self.stiffness * d;
            h[(a, a)] += self.stiffness;
        }
        (e, f, h)
    }
}

/// Constraints resolved per vertex.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConstraintTable {
    pub fixed: Vec<bool>,
    pub subspace: Vec<Option<(Vec<Vec3>, Vec3)>>,
    pub boxes: Vec<Vec<WorldBox>>,
}

impl ConstraintTable {
    pub fn new(num_vertices: usize, constraints: &[Constraint]) -> Result<Self, String> {
        let mut t = Self {
            fixed: vec![false; num_vertices],
            subspace: vec![None; num_vertices],
            boxes: vec![Vec::new(); num_vertices],
        };
        for (k, c) in constraints.iter().enumerate() {
            if c.vertex >= num_vertices {
                return Err(format!(
                    "constraint {k}: vertex {} out of range ({num_vertices} vertices)",
                    c.vertex
                ));
            }
            match &c.kind {
                ConstraintKind::Fixed => t.fixed[c.vertex] = true,
                ConstraintKind::Subspace { basis, anchor } => {
                    if basis.is_empty() || basis.len() > 2 {
                        return Err(format!("constraint {k}: subspace dimension must be 1 or 2"));
                    }
                    for (i, a) in basis.iter().enumerate() {
                        for (j, b) in basis.iter().enumerate() {
                            let target = if i == j { 1.0 } else { 0.0 };
                            if (a.dot(b) - target).abs() > 1e-9 {
                                return Err(format!("constraint {k}: basis is not orthonormal"));
                            }
                        }
                    }
                    if t.subspace[c.vertex].is_some() {
                        return Err(format!("constraint {k}: vertex {} already has a subspace", c.vertex));
                    }
                    t.subspace[c.vertex] = Some((basis.clone(), *anchor));
                }
                ConstraintKind::WorldBox { min, max, stiffness } => {
                    if !(0..3).all(|a| min[a] < max[a]) {
                        return Err(format!("constraint {k}: box min must be below max"));
                    }
                    if !(*stiffness >= 0.0 && stiffness.is_finite()) {
                        return Err(format!("constraint {k}: box stiffness must be non-negative"));
                    }
                    t.boxes[c.vertex].push(WorldBox {
                        min: *min,
                        max: *max,
                        stiffness: *stiffness,
                    });
                }
            }
        }
        Ok(t)
    }

    pub fn unconstrained(num_vertices: usize) -> Self {
        Self::new(num_vertices, &[]).expect("empty constraint list")
    }

    /// Projects `x` onto the vertex's subspace, if it has one.
    pub fn project(&self, vertex: usize, x: &Vec3) -> Vec3 {
        match &self.subspace[vertex] {
            Some((basis, anchor)) => {
                let d = x - anchor;
                anchor + basis.iter().map(|b| b * b.dot(&d)).sum::<Vec3>()
            }
            None => *x,
        }
    }

    pub fn box_derivatives(&self, vertex: usize, x: &Vec3) -> (f64, Vec3, Mat3) {
        self.boxes[vertex].iter().fold(
            (0.0, Vec3::zeros(), Mat3::zeros()),
            |(e, f, h), b| {
                let (be, bf, bh) = b.derivatives(x);
                (e + be, f + bf, h + bh)
            },
        )
    }
}
