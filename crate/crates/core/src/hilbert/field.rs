use num_complex::Complex64;

use super::Sign;
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// Cavity field in the truncated Fock basis `|0⟩ … |dim-1⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    amps: Vec<Complex64>,
}

impl FieldState {
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::invalid("dim", "field truncation must be at least 1"));
        }
        Ok(FieldState { amps })
    }

    pub fn vacuum(dim: usize) -> Result<Self> {
        Self::fock(0, dim)
    }

    pub fn fock(n: usize, dim: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: n + 1,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[n] = Complex64::new(1.0, 0.0);
        Ok(FieldState { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Returns a unit-norm copy. Fails on the zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(Error::NormDrift { norm });
        }
        Ok(self.scaled(Complex64::new(1.0 / norm, 0.0)))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        FieldState {
            amps: self.amps.iter().map(|&c| c * factor).collect(),
        }
    }

    /// `Σ n |c_n|²` for the state as stored (no renormalization).
    pub fn mean_photon_number(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum()
    }

    /// Population of the highest retained Fock level.
    pub fn tail_mass(&self) -> f64 {
        self.amps[self.dim() - 1].norm_sqr()
    }

    pub fn inner(&self, other: &FieldState) -> Result<Complex64> {
        inner(self, other)
    }

    /// Photon-number parity operator `(-1)^{a†a}` applied to the state.
    pub fn parity_flipped(&self) -> Self {
        FieldState {
            amps: self
                .amps
                .iter()
                .enumerate()
                .map(|(n, &c)| if n % 2 == 0 { c } else { -c })
                .collect(),
        }
    }
}

/// Pre-normalization population of `|dim-1⟩` for a coherent amplitude.
///
/// With a single retained level the discarded mass `1 − e^{−|α|²}` is used,
/// so the vacuum stays representable at `dim = 1`.
pub fn coherent_tail_mass(alpha: Complex64, dim: usize) -> f64 {
    let mean = alpha.norm_sqr();
    if dim <= 1 {
        return -(-mean).exp_m1();
    }
    if mean == 0.0 {
        return 0.0;
    }
    let n = (dim - 1) as f64;
    let log_fact: f64 = (1..dim).map(|k| (k as f64).ln()).sum();
    (-mean + n * mean.ln() - log_fact).exp()
}

/// Coherent state `|α⟩ = e^{−|α|²/2} Σ αⁿ/√(n!) |n⟩`, renormalized over the
/// truncated basis.
pub fn make_coherent(alpha: Complex64, dim: usize) -> Result<FieldState> {
    make_coherent_with(alpha, dim, &Tolerances::default())
}

pub fn make_coherent_with(alpha: Complex64, dim: usize, tol: &Tolerances) -> Result<FieldState> {
    if dim == 0 {
        return Err(Error::invalid("dim", "field truncation must be at least 1"));
    }
    let tail = coherent_tail_mass(alpha, dim);
    if tail > tol.tail {
        return Err(Error::TailMassExceeded {
            tail,
            tolerance: tol.tail,
        });
    }
    let mut amps = Vec::with_capacity(dim);
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    amps.push(c);
    for n in 1..dim {
        c = c * alpha / (n as f64).sqrt();
        amps.push(c);
    }
    FieldState { amps }.normalized()
}

/// `Σ_n conj(x_n) y_n`.
pub fn inner(x: &FieldState, y: &FieldState) -> Result<Complex64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    Ok(x.amps.iter().zip(&y.amps).map(|(a, b)| a.conj() * b).sum())
}

/// Even (`+`) or odd (`−`) coherent superposition `|α⟩ ± |−α⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct CatState {
    pub sign: Sign,
    /// The raw vector, or the normalized one when requested.
    pub state: FieldState,
    /// `N± = ⟨±|±⟩` of the raw superposition.
    pub raw_norm_sqr: f64,
}

/// Builds `|α⟩ ± |−α⟩` from the truncated coherent state.
///
/// `|−α⟩` is the parity image of `|α⟩`, so the even/odd vectors have exactly
/// disjoint Fock support and are orthogonal to the last bit.
pub fn cat_state(alpha: Complex64, sign: Sign, dim: usize, normalize: bool) -> Result<CatState> {
    if sign == Sign::Minus && alpha.norm_sqr() == 0.0 {
        return Err(Error::DegenerateCat);
    }
    let coherent = make_coherent(alpha, dim)?;
    let keep_odd = sign == Sign::Minus;
    let amps: Vec<Complex64> = coherent
        .amps
        .iter()
        .enumerate()
        .map(|(n, &c)| if (n % 2 == 1) == keep_odd { 2.0 * c } else { Complex64::new(0.0, 0.0) })
        .collect();
    let raw = FieldState { amps };
    let raw_norm_sqr = raw.norm_sqr();
    if raw_norm_sqr == 0.0 {
        return Err(Error::DegenerateCat);
    }
    let state = if normalize { raw.normalized()? } else { raw };
    Ok(CatState {
        sign,
        state,
        raw_norm_sqr,
    })
}
