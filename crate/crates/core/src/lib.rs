//! Truncated Fock-space simulation of cavity-QED entanglement protocols.
//!
//! Three-level cascade atoms (reduced to their `{f, g}` pair) imprint a
//! photon-number-dependent phase on a coherent cavity field, Ramsey zones act
//! as ideal 2×2 rotations, and resonant `{a, b}` probe atoms evolve under the
//! exact Jaynes-Cummings propagator. On top of that machinery the crate
//! prepares the four Bell states, the atomic and atom-cavity GHZ states, and
//! runs the single-shot GHZ test against the local-hidden-variable prediction.
//!
//! Modules, bottom-up:
//!
//! * [`hilbert`]: field and composite states, measurement, partial trace, fidelity.
//! * [`dynamics`]: conditional phase, dispersive and resonant propagators,
//!   displacement and Ramsey rotations.
//! * [`protocol`]: declarative step sequences and the preparation recipes.
//! * [`ghztest`]: Mermin observables, the LHV counter-argument and shot sampling.

pub mod dynamics;
pub mod error;
pub mod ghztest;
pub mod hilbert;
pub mod protocol;
pub mod tolerance;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use tolerance::Tolerances;

/// Convenience constructor for complex literals.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
