use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::phase::apply_dispersive;
use crate::error::{Error, Result};
use crate::hilbert::{AtomId, AtomSlot, CompositeState, FieldState, LevelPair, Space};

/// Jaynes-Cummings parameters in units where only `g·t` and `Δ/g` matter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JcParams {
    pub g: f64,
    pub t: f64,
    /// `Δ = (ω_e − ω_f) − ω`.
    pub delta: f64,
}

impl JcParams {
    pub fn new(g: f64, t: f64, delta: f64) -> Result<Self> {
        if !(g >= 0.0 && g.is_finite()) {
            return Err(Error::invalid("g", format!("coupling must be finite and ≥ 0, got {g}")));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::invalid("t", format!("interaction time must be finite and ≥ 0, got {t}")));
        }
        if !delta.is_finite() {
            return Err(Error::invalid("delta", "detuning must be finite"));
        }
        Ok(JcParams { g, t, delta })
    }

    /// Resonant probe with `g = 1` for a dimensionless time `g·t`.
    pub fn resonant(gt: f64) -> Result<Self> {
        Self::new(1.0, gt, 0.0)
    }

    /// Interaction-picture block on `{(a, n), (b, n+1)}`, rows/cols in that order.
    fn block(&self, n: usize) -> [[Complex64; 2]; 2] {
        let JcParams { g, t, delta } = *self;
        let coupling = g * ((n + 1) as f64).sqrt();
        let half = 0.5 * delta;
        let mu = (coupling * coupling + half * half).sqrt();
        let cos = (mu * t).cos();
        let sinc_t = if (mu * t).abs() < 1e-8 {
            t * (1.0 - (mu * t).powi(2) / 6.0)
        } else {
            (mu * t).sin() / mu
        };
        let up = Complex64::from_polar(1.0, half * t);
        let down = up.conj();
        let i = Complex64::i();
        [
            [up * (cos - i * half * sinc_t), -i * coupling * sinc_t * up],
            [-i * coupling * sinc_t * down, down * (cos + i * half * sinc_t)],
        ]
    }
}

fn require_probe(state: &CompositeState, atom: AtomId) -> Result<usize> {
    let slot = state.space().slot(atom)?;
    if slot.levels != LevelPair::Ab {
        return Err(Error::WrongLevelPair {
            atom,
            expected: LevelPair::Ab,
            found: slot.levels,
        });
    }
    state.space().position(atom)
}

/// Exact interaction-picture Jaynes-Cummings propagator for an `{a, b}` atom.
///
/// The evolution is block-diagonal over `{(a, n), (b, n+1)}` with
/// `μ_n = √(g²(n+1) + Δ²/4)`. `(b, 0)` is invariant. In the truncated space
/// `(a, dim−1)` has no partner and is left unchanged, which is the exact
/// evolution of the truncated Hamiltonian.
pub fn apply_jc(state: &CompositeState, atom: AtomId, params: JcParams) -> Result<CompositeState> {
    let pos = require_probe(state, atom)?;
    let dim = state.dim();
    let blocks: Vec<_> = (0..dim.saturating_sub(1)).map(|n| params.block(n)).collect();
    let mut out = state.clone();
    let pairs: Vec<_> = state.space().level_pairs(pos).collect();
    let amps = out.amplitudes_mut();
    for (i_a, i_b) in pairs {
        let n = i_a % dim;
        if n + 1 >= dim {
            continue;
        }
        let j_b = i_b + 1;
        let u = &blocks[n];
        let (ca, cb) = (amps[i_a], amps[j_b]);
        amps[i_a] = u[0][0] * ca + u[0][1] * cb;
        amps[j_b] = u[1][0] * ca + u[1][1] * cb;
    }
    Ok(out)
}

/// Result of sending a lower-state resonant probe through a field.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeBranches {
    /// Unnormalized field left with the probe in `a`.
    pub chi_a: FieldState,
    /// Unnormalized field left with the probe in `b`.
    pub chi_b: FieldState,
    pub p_a: f64,
    pub p_b: f64,
}

/// `|b⟩|ψ⟩ → |a⟩|χ_a⟩ + |b⟩|χ_b⟩` at resonance, with
/// `χ_b = Σ C_n cos(gt√n)|n⟩` and `χ_a = −i Σ C_{n+1} sin(gt√(n+1))|n⟩`.
pub fn probe_branches(field: &FieldState, gt: f64) -> Result<ProbeBranches> {
    let norm = field.norm_sqr();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NormDrift { norm });
    }
    let c = field.amplitudes();
    let dim = c.len();
    let chi_b: Vec<Complex64> = (0..dim).map(|n| c[n] * (gt * (n as f64).sqrt()).cos()).collect();
    let chi_a: Vec<Complex64> = (0..dim)
        .map(|n| {
            if n + 1 < dim {
                let root = ((n + 1) as f64).sqrt();
                c[n + 1] * Complex64::new(0.0, -(gt * root).sin())
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let chi_a = FieldState::from_amplitudes(chi_a)?;
    let chi_b = FieldState::from_amplitudes(chi_b)?;
    let (p_a, p_b) = (chi_a.norm_sqr(), chi_b.norm_sqr());
    Ok(ProbeBranches { chi_a, chi_b, p_a, p_b })
}

/// Probe time `τ = π / (2g√n̄)` with `n̄` the integer nearest the mean photon number.
pub fn optimal_probe_time(nbar: f64, g: f64) -> Result<f64> {
    if !nbar.is_finite() || nbar <= 0.0 {
        return Err(Error::InvalidPhotonNumber(nbar));
    }
    if !g.is_finite() || g <= 0.0 {
        return Err(Error::invalid("g", format!("coupling must be positive, got {g}")));
    }
    let nearest = nbar.round();
    if nearest < 1.0 {
        return Err(Error::InvalidPhotonNumber(nbar));
    }
    Ok(PI / (2.0 * g * nearest.sqrt()))
}

fn single_probe_space(dim: usize) -> Result<Space> {
    Space::new(
        vec![AtomSlot {
            id: AtomId(1),
            levels: LevelPair::Ab,
        }],
        dim,
    )
}

fn assemble<F>(dim: usize, op: F) -> Result<DMatrix<Complex64>>
where
    F: Fn(&CompositeState) -> Result<CompositeState>,
{
    let space = single_probe_space(dim)?;
    let len = space.len();
    let mut m = DMatrix::zeros(len, len);
    for col in 0..len {
        let mut amps = vec![Complex64::new(0.0, 0.0); len];
        amps[col] = Complex64::new(1.0, 0.0);
        let basis = CompositeState::from_amplitudes(space.clone(), amps)?;
        let image = op(&basis)?;
        for (row, &c) in image.amplitudes().iter().enumerate() {
            m[(row, col)] = c;
        }
    }
    Ok(m)
}

/// Explicit `2·dim` square matrix of [`apply_jc`] for a single probe atom
/// (index `bit·dim + n`, `a` first).
pub fn jc_propagator_matrix(params: JcParams, dim: usize) -> Result<DMatrix<Complex64>> {
    assemble(dim, |s| apply_jc(s, AtomId(1), params))
}

/// Explicit matrix of [`apply_dispersive`] in the same layout.
pub fn dispersive_matrix(phi: f64, dim: usize) -> Result<DMatrix<Complex64>> {
    assemble(dim, |s| apply_dispersive(s, AtomId(1), phi))
}

/// Hilbert-Schmidt distance between the exact propagator and the
/// large-detuning propagator at fixed `φ = g²t/Δ`, with `g = 1`,
/// `Δ = delta_over_g`, `t = φΔ`.
///
/// The comparison runs over the excitation blocks that lie entirely inside
/// the truncation, so `(a, dim−1)` is excluded.
pub fn dispersive_distance(delta_over_g: f64, phi: f64, dim: usize) -> Result<f64> {
    if !delta_over_g.is_finite() || delta_over_g <= 0.0 {
        return Err(Error::invalid("delta_over_g", format!("must be positive, got {delta_over_g}")));
    }
    if dim < 2 {
        return Err(Error::invalid("dim", "need at least two Fock levels"));
    }
    let params = JcParams::new(1.0, phi * delta_over_g, delta_over_g)?;
    let exact = jc_propagator_matrix(params, dim)?;
    let approx = dispersive_matrix(phi, dim)?;
    let excluded = dim - 1; // (a, dim−1)
    let mut sum = 0.0;
    for i in (0..2 * dim).filter(|&i| i != excluded) {
        for j in (0..2 * dim).filter(|&j| j != excluded) {
            sum += (exact[(i, j)] - approx[(i, j)]).norm_sqr();
        }
    }
    Ok(sum.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergencePoint {
    pub delta_over_g: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub phi: f64,
    pub dim: usize,
    pub rows: Vec<ConvergencePoint>,
    /// `None` for fewer than two rows.
    pub monotone_decreasing: Option<bool>,
}

impl ConvergenceTable {
    /// `distance[i] / distance[i+1]` for consecutive rows.
    pub fn ratios(&self) -> Vec<f64> {
        self.rows.windows(2).map(|w| w[0].distance / w[1].distance).collect()
    }
}

/// Distance table over increasing `Δ/g`.
pub fn dispersive_convergence(ratios: &[f64], phi: f64, dim: usize) -> Result<ConvergenceTable> {
    if ratios.is_empty() {
        return Err(Error::invalid("delta_over_g", "list is empty"));
    }
    let rows = ratios
        .iter()
        .map(|&r| {
            Ok(ConvergencePoint {
                delta_over_g: r,
                distance: dispersive_distance(r, phi, dim)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let monotone_decreasing = (rows.len() > 1).then(|| rows.windows(2).all(|w| w[1].distance < w[0].distance));
    Ok(ConvergenceTable {
        phi,
        dim,
        rows,
        monotone_decreasing,
    })
}
