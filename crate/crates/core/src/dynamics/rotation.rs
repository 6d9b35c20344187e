use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{AtomId, CompositeState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RotationKind {
    /// Preparation/closing Ramsey zone, `[[1, 1], [−1, 1]]/√2`.
    R,
    /// GHZ-test analysis zone, `[[1, −1], [1, 1]]/√2`.
    K,
    /// Bell-basis conversion, `|g⟩⟨f| − |f⟩⟨g|`.
    R5,
    Custom,
}

/// Ideal Ramsey-zone unitary acting on the coefficient column
/// `(c_first, c_second)` of one atom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation2 {
    pub kind: RotationKind,
    matrix: [[Complex64; 2]; 2],
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl Rotation2 {
    pub fn new(kind: RotationKind, matrix: [[Complex64; 2]; 2]) -> Result<Self> {
        let rot = Rotation2 { kind, matrix };
        let deviation = rot.unitarity_deviation();
        if deviation > 1e-10 || !deviation.is_finite() {
            return Err(Error::NonUnitaryRotation { deviation });
        }
        Ok(rot)
    }

    pub fn ramsey() -> Self {
        let h = FRAC_1_SQRT_2;
        Rotation2 {
            kind: RotationKind::R,
            matrix: [[re(h), re(h)], [re(-h), re(h)]],
        }
    }

    pub fn analysis() -> Self {
        let h = FRAC_1_SQRT_2;
        Rotation2 {
            kind: RotationKind::K,
            matrix: [[re(h), re(-h)], [re(h), re(h)]],
        }
    }

    pub fn bell_swap() -> Self {
        Rotation2 {
            kind: RotationKind::R5,
            matrix: [[re(0.0), re(-1.0)], [re(1.0), re(0.0)]],
        }
    }

    /// `diag(1, −1)`: flips the sign of the second-listed level.
    pub fn phase_flip() -> Self {
        Rotation2 {
            kind: RotationKind::Custom,
            matrix: [[re(1.0), re(0.0)], [re(0.0), re(-1.0)]],
        }
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        self.matrix
    }

    /// `max |(U†U − I)_ij|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let m = &self.matrix;
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                let dot: Complex64 = (0..2).map(|k| m[k][i].conj() * m[k][j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).norm());
            }
        }
        worst
    }

    pub fn apply(&self, c: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.matrix;
        [m[0][0] * c[0] + m[0][1] * c[1], m[1][0] * c[0] + m[1][1] * c[1]]
    }

    /// `self · other` (apply `other` first).
    pub fn then_after(&self, other: &Rotation2) -> Rotation2 {
        let (a, b) = (&self.matrix, &other.matrix);
        let mut out = [[re(0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Rotation2 {
            kind: RotationKind::Custom,
            matrix: out,
        }
    }
}

/// Applies `rot` to one atom across every other index of the state.
pub fn rotate(state: &CompositeState, atom: AtomId, rot: &Rotation2) -> Result<CompositeState> {
    let deviation = rot.unitarity_deviation();
    if deviation > 1e-10 {
        return Err(Error::NonUnitaryRotation { deviation });
    }
    let pos = state.space().position(atom)?;
    let mut out = state.clone();
    let pairs: Vec<_> = state.space().level_pairs(pos).collect();
    let amps = out.amplitudes_mut();
    for (i0, i1) in pairs {
        let [c0, c1] = rot.apply([amps[i0], amps[i1]]);
        amps[i0] = c0;
        amps[i1] = c1;
    }
    Ok(out)
}
