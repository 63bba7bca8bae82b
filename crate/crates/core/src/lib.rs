pub mod baselines;
pub mod contact;
pub mod harness;
pub mod materials;
pub mod math;
pub mod mesh;
pub mod solver;
