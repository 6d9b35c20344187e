use thiserror::Error;

use crate::hilbert::{AtomId, Level, LevelPair};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("truncation too small: tail mass {tail:.3e} at the last Fock level exceeds tolerance {tolerance:.1e}")]
    TailMassExceeded { tail: f64, tolerance: f64 },

    #[error("odd cat state at zero amplitude is the zero vector")]
    DegenerateCat,

    #[error("post-selected outcome {outcome} of atom {atom} has probability {probability:.3e}")]
    ZeroProbabilityBranch {
        atom: AtomId,
        outcome: Level,
        probability: f64,
    },

    #[error("atom {atom} has levels {found}, operation requires {expected}")]
    WrongLevelPair {
        atom: AtomId,
        expected: LevelPair,
        found: LevelPair,
    },

    #[error("unknown atom {0}")]
    UnknownAtom(AtomId),

    #[error("atom {0} already present")]
    DuplicateAtom(AtomId),

    #[error("atom {0} measured more than once")]
    AlreadyMeasured(AtomId),

    #[error("rotation deviates from unitarity by {deviation:.3e}")]
    NonUnitaryRotation { deviation: f64 },

    #[error("mean photon number must be positive, got {0}")]
    InvalidPhotonNumber(f64),

    #[error("operation requires {expected} atoms, space has {found}")]
    WrongAtomCount { expected: usize, found: usize },

    #[error("state norm drifted to {norm:.15}")]
    NormDrift { norm: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures caused by numerics (truncation, norm, vanishing
    /// branches) rather than by malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::TailMassExceeded { .. } | Error::NormDrift { .. } | Error::ZeroProbabilityBranch { .. }
        )
    }
}
