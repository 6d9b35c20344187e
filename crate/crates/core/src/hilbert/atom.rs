use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Atom label, the 1-based creation order (`A1`, `A2`, …).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AtomId(pub u32);

impl fmt::Display for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{}", self.0)
    }
}

/// Atomic level names. `f`/`g` belong to dispersively coupled cascade atoms,
/// `a`/`b` (upper/lower) to resonant probe atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    F,
    G,
    A,
    B,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::F => "f",
            Level::G => "g",
            Level::A => "a",
            Level::B => "b",
        })
    }
}

impl std::str::FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "f" => Ok(Level::F),
            "g" => Ok(Level::G),
            "a" => Ok(Level::A),
            "b" => Ok(Level::B),
            other => Err(format!("unknown level `{other}`")),
        }
    }
}

/// The two admissible level pairs, first-listed level first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LevelPair {
    Fg,
    Ab,
}

impl LevelPair {
    pub fn levels(self) -> [Level; 2] {
        match self {
            LevelPair::Fg => [Level::F, Level::G],
            LevelPair::Ab => [Level::A, Level::B],
        }
    }

    /// Bit used in the flat index: 0 for the first-listed level, 1 for the second.
    pub fn bit_of(self, level: Level) -> Option<usize> {
        self.levels().iter().position(|&l| l == level)
    }

    pub fn level(self, bit: usize) -> Level {
        self.levels()[bit & 1]
    }
}

impl fmt::Display for LevelPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y] = self.levels();
        write!(f, "{{{x},{y}}}")
    }
}

/// A standalone two-level atom.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomState {
    pub id: AtomId,
    pub levels: LevelPair,
    amps: [Complex64; 2],
}

impl AtomState {
    pub fn new(id: AtomId, levels: LevelPair, amps: [Complex64; 2]) -> Result<Self> {
        let norm = amps[0].norm_sqr() + amps[1].norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NormDrift { norm });
        }
        Ok(AtomState { id, levels, amps })
    }

    pub fn basis(id: AtomId, levels: LevelPair, level: Level) -> Result<Self> {
        let bit = levels.bit_of(level).ok_or_else(|| {
            Error::invalid("level", format!("{level} is not in {levels}"))
        })?;
        let mut amps = [Complex64::new(0.0, 0.0); 2];
        amps[bit] = Complex64::new(1.0, 0.0);
        Ok(AtomState { id, levels, amps })
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        self.amps
    }

    pub fn amplitude(&self, level: Level) -> Option<Complex64> {
        self.levels.bit_of(level).map(|b| self.amps[b])
    }
}
