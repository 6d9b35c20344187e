//! Unitary generators acting on [`CompositeState`](crate::hilbert::CompositeState)s.
//!
//! Couplings are dimensionless: `g = 1` by convention in the recipes, so a
//! probe "time" is the product `g·t` and detunings enter as `Δ/g`.

mod displacement;
mod jc;
mod phase;
mod rotation;

pub use displacement::{displace, displacement_matrix, Displace};
pub use jc::{
    apply_jc, dispersive_convergence, dispersive_distance, dispersive_matrix, jc_propagator_matrix,
    optimal_probe_time, probe_branches, ConvergencePoint, ConvergenceTable, JcParams, ProbeBranches,
};
pub use phase::{apply_conditional_phase, apply_dispersive};
pub use rotation::{rotate, Rotation2, RotationKind};
