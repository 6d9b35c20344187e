/// Absolute tolerances used across the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Largest admissible `|c_{dim-1}|²` before normalization.
    pub tail: f64,
    /// Allowed drift of the global norm after a unitary step.
    pub norm: f64,
    /// Allowed `‖U†U − I‖` for user-supplied rotations.
    pub unitarity: f64,
    /// Post-selected outcomes below this probability are rejected.
    pub zero_probability: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tail: 1e-12,
            norm: 1e-10,
            unitarity: 1e-10,
            zero_probability: 1e-14,
        }
    }
}
