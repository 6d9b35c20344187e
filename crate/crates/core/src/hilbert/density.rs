use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{AtomId, AtomSlot, CompositeState, Space};
use crate::error::{Error, Result};

/// Which subsystems survive a partial trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemMask {
    pub atoms: Vec<AtomId>,
    pub field: bool,
}

impl SubsystemMask {
    pub fn atoms(ids: impl IntoIterator<Item = u32>) -> Self {
        SubsystemMask {
            atoms: ids.into_iter().map(AtomId).collect(),
            field: false,
        }
    }

    pub fn with_field(mut self) -> Self {
        self.field = true;
        self
    }
}

/// Reduced density matrix over the retained subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityBlock {
    space: Space,
    matrix: DMatrix<Complex64>,
}

impl DensityBlock {
    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        // Tr ρ² = Σ |ρ_ij|² for Hermitian ρ
        self.matrix.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `max |ρ − ρ†|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.matrix.nrows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }

    /// State vector of a pure block, fixed up to a global phase by making the
    /// largest-weight amplitude real. Fails if `1 − purity` exceeds `tolerance`.
    pub fn pure_state(&self, tolerance: f64) -> Result<CompositeState> {
        let purity = self.purity();
        if 1.0 - purity > tolerance {
            return Err(Error::invalid("state", format!("reduced state is mixed (purity {purity})")));
        }
        let n = self.matrix.nrows();
        let pivot = (0..n)
            .max_by(|&a, &b| self.matrix[(a, a)].re.total_cmp(&self.matrix[(b, b)].re))
            .ok_or_else(|| Error::invalid("state", "empty density block"))?;
        let scale = 1.0 / self.matrix[(pivot, pivot)].re.sqrt();
        let amps = (0..n).map(|i| self.matrix[(i, pivot)] * scale).collect();
        CompositeState::from_unnormalized(self.space.clone(), amps)
    }

    /// `⟨target|ρ|target⟩`.
    pub fn fidelity(&self, target: &CompositeState) -> Result<f64> {
        if target.space() != &self.space {
            return Err(Error::DimensionMismatch {
                expected: self.space.len(),
                found: target.space().len(),
            });
        }
        let psi = target.amplitudes();
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, pi) in psi.iter().enumerate() {
            if pi.norm_sqr() == 0.0 {
                continue;
            }
            for (j, pj) in psi.iter().enumerate() {
                acc += pi.conj() * self.matrix[(i, j)] * pj;
            }
        }
        Ok(acc.re)
    }
}

/// Partial trace over every subsystem not named in `keep`.
pub fn reduce(state: &CompositeState, keep: &SubsystemMask) -> Result<DensityBlock> {
    if keep.atoms.is_empty() && !keep.field {
        return Err(Error::invalid("keep", "subsystem mask is empty"));
    }
    let space = state.space();
    let mut kept_slots: Vec<AtomSlot> = Vec::new();
    for &id in &keep.atoms {
        kept_slots.push(space.slot(id)?);
    }
    let kept_space = Space::new(kept_slots, if keep.field { space.field_dim() } else { 1 })?;

    // (dimension, kept?) per subsystem, most significant first
    let mut dims: Vec<(usize, bool)> = space
        .atoms()
        .iter()
        .map(|s| (2, keep.atoms.contains(&s.id)))
        .collect();
    dims.push((space.field_dim(), keep.field));

    let kept_len = kept_space.len();
    let traced_len = space.len() / kept_len;
    let mut m = DMatrix::<Complex64>::zeros(kept_len, traced_len);
    for (flat, &c) in state.amplitudes().iter().enumerate() {
        let mut rest = flat;
        let (mut k, mut k_scale, mut t, mut t_scale) = (0, 1, 0, 1);
        for &(d, kept) in dims.iter().rev() {
            let digit = rest % d;
            rest /= d;
            if kept {
                k += digit * k_scale;
                k_scale *= d;
            } else {
                t += digit * t_scale;
                t_scale *= d;
            }
        }
        m[(k, t)] = c;
    }
    let matrix = &m * m.adjoint();
    Ok(DensityBlock {
        space: kept_space,
        matrix,
    })
}

/// `|⟨target|state⟩|²` for two pure states on the same space.
pub fn fidelity(state: &CompositeState, target: &CompositeState) -> Result<f64> {
    Ok(target.inner(state)?.norm_sqr())
}
