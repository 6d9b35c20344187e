//! State representation: Fock-space field vectors, two-level atoms and their
//! tensor product, plus measurement collapse, partial trace and fidelity.
//!
//! Flat layout of a [`CompositeState`]: atoms in ascending label order, the
//! first atom most significant, the field index varying fastest. For atoms
//! `(b_1, …, b_m)` and photon number `n` the flat index is
//! `(Σ_k b_k · 2^{m-k}) · dim + n`, where `b_k = 0` selects the first-listed
//! level of the atom's pair (`f` or `a`).

mod atom;
mod composite;
mod density;
mod field;

use serde::{Deserialize, Serialize};

pub use atom::{AtomId, AtomState, Level, LevelPair};
pub use composite::{compose, measure_atom, AtomSlot, CompositeState, Measurement, Space};
pub use density::{fidelity, reduce, DensityBlock, SubsystemMask};
pub use field::{cat_state, coherent_tail_mass, inner, make_coherent, make_coherent_with, CatState, FieldState};

/// Sign selector shared by cat states, Bell/GHZ variants and eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

impl std::str::FromStr for Sign {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "+" | "plus" | "+1" => Ok(Sign::Plus),
            "-" | "minus" | "-1" => Ok(Sign::Minus),
            other => Err(format!("expected + or -, got `{other}`")),
        }
    }
}
