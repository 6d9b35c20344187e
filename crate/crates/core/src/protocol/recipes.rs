use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::step::{run_protocol, MeasureMode, ProtocolRun, ProtocolStep};
use crate::c64;
use crate::dynamics::{optimal_probe_time, JcParams, Rotation2};
use crate::error::{Error, Result};
use crate::hilbert::{
    cat_state, reduce, AtomId, AtomSlot, CompositeState, Level, LevelPair, Sign, Space, SubsystemMask,
};

/// Shared knobs of the preparation recipes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecipeParams {
    /// Real cavity amplitude, also the injected displacement.
    pub alpha: f64,
    pub dim: usize,
    /// Resonant probe `g·t`; `None` picks the optimal time for the injected field.
    pub gt: Option<f64>,
    /// Conditional phase of each cascade atom.
    pub phi: f64,
}

impl RecipeParams {
    pub fn new(alpha: f64, dim: usize) -> Self {
        RecipeParams {
            alpha,
            dim,
            gt: None,
            phi: PI,
        }
    }

    pub fn with_gt(mut self, gt: f64) -> Self {
        self.gt = Some(gt);
        self
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha == 0.0 {
            return Err(Error::DegenerateCat);
        }
        if !self.alpha.is_finite() || self.alpha <= 0.0 {
            return Err(Error::invalid("alpha", format!("must be real and positive, got {}", self.alpha)));
        }
        if self.dim < 2 {
            return Err(Error::invalid("dim", format!("need at least two Fock levels, got {}", self.dim)));
        }
        if !self.phi.is_finite() {
            return Err(Error::invalid("phi", "must be finite"));
        }
        if let Some(gt) = self.gt {
            if !gt.is_finite() || gt <= 0.0 {
                return Err(Error::invalid("gt", format!("must be positive, got {gt}")));
            }
        }
        Ok(())
    }

    /// Probe time, defaulting to `π / (2√n̄)` with `n̄ = |2α|²`.
    pub fn probe_gt(&self) -> Result<f64> {
        match self.gt {
            Some(gt) => Ok(gt),
            None => optimal_probe_time((2.0 * self.alpha).powi(2), 1.0),
        }
    }
}

/// The four Bell states of `A1`, `A2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EprVariant {
    #[serde(rename = "phi+")]
    PhiPlus,
    #[serde(rename = "phi-")]
    PhiMinus,
    #[serde(rename = "psi+")]
    PsiPlus,
    #[serde(rename = "psi-")]
    PsiMinus,
}

impl EprVariant {
    pub const ALL: [EprVariant; 4] = [
        EprVariant::PhiPlus,
        EprVariant::PhiMinus,
        EprVariant::PsiPlus,
        EprVariant::PsiMinus,
    ];

    /// Sign of the injected displacement.
    fn injection(self) -> f64 {
        match self {
            EprVariant::PhiPlus | EprVariant::PsiMinus => 1.0,
            EprVariant::PhiMinus | EprVariant::PsiPlus => -1.0,
        }
    }

    fn swapped(self) -> bool {
        matches!(self, EprVariant::PsiPlus | EprVariant::PsiMinus)
    }
}

impl fmt::Display for EprVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EprVariant::PhiPlus => "phi+",
            EprVariant::PhiMinus => "phi-",
            EprVariant::PsiPlus => "psi+",
            EprVariant::PsiMinus => "psi-",
        })
    }
}

impl FromStr for EprVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "phi+" | "phi-plus" | "Φ+" => Ok(EprVariant::PhiPlus),
            "phi-" | "phi-minus" | "Φ-" => Ok(EprVariant::PhiMinus),
            "psi+" | "psi-plus" | "Ψ+" => Ok(EprVariant::PsiPlus),
            "psi-" | "psi-minus" | "Ψ-" => Ok(EprVariant::PsiMinus),
            _ => Err(Error::invalid("variant", format!("unknown Bell variant {s:?}"))),
        }
    }
}

/// Whether the third GHZ party is an atom or the cavity field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GhzMode {
    Atomic,
    Hybrid,
}

impl fmt::Display for GhzMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GhzMode::Atomic => "atomic",
            GhzMode::Hybrid => "hybrid",
        })
    }
}

impl FromStr for GhzMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "atomic" => Ok(GhzMode::Atomic),
            "hybrid" => Ok(GhzMode::Hybrid),
            _ => Err(Error::invalid("mode", format!("expected atomic or hybrid, got {s:?}"))),
        }
    }
}

/// Ground-state cascade atom through Ramsey zone, cavity, Ramsey zone.
/// `atom` must be the label the new atom will receive.
pub fn cascade_pipeline(atom: AtomId, phi: f64) -> Vec<ProtocolStep> {
    vec![
        ProtocolStep::AddAtom { levels: LevelPair::Fg, initial: Level::G },
        ProtocolStep::Rotate { atom, rotation: Rotation2::ramsey() },
        ProtocolStep::ConditionalPhase { atom, phi },
        ProtocolStep::Rotate { atom, rotation: Rotation2::ramsey() },
    ]
}

/// Lower-state resonant probe, post-selected on its upper level.
pub fn probe_steps(atom: AtomId, gt: f64) -> Result<Vec<ProtocolStep>> {
    Ok(vec![
        ProtocolStep::AddAtom { levels: LevelPair::Ab, initial: Level::B },
        ProtocolStep::ResonantProbe { atom, params: JcParams::resonant(gt)? },
        ProtocolStep::Measure { atom, basis: LevelPair::Ab, mode: MeasureMode::PostSelect(Level::A) },
    ])
}

pub fn epr_steps(variant: EprVariant, params: &RecipeParams) -> Result<Vec<ProtocolStep>> {
    params.validate()?;
    let mut steps = cascade_pipeline(AtomId(1), params.phi);
    steps.extend(cascade_pipeline(AtomId(2), params.phi));
    steps.push(ProtocolStep::Inject { beta: c64(variant.injection() * params.alpha, 0.0) });
    steps.extend(probe_steps(AtomId(3), params.probe_gt()?)?);
    if variant.swapped() {
        steps.push(ProtocolStep::Rotate { atom: AtomId(2), rotation: Rotation2::bell_swap() });
    }
    Ok(steps)
}

pub fn ghz_steps(sign: Sign, mode: GhzMode, params: &RecipeParams) -> Result<Vec<ProtocolStep>> {
    params.validate()?;
    let mut steps = cascade_pipeline(AtomId(1), params.phi);
    steps.extend(cascade_pipeline(AtomId(2), params.phi));
    match mode {
        GhzMode::Atomic => {
            steps.extend(cascade_pipeline(AtomId(3), params.phi));
            steps.push(ProtocolStep::Inject { beta: c64(sign.value() * params.alpha, 0.0) });
            steps.extend(probe_steps(AtomId(4), params.probe_gt()?)?);
        }
        GhzMode::Hybrid => {
            if sign == Sign::Minus {
                steps.push(ProtocolStep::Rotate { atom: AtomId(1), rotation: Rotation2::phase_flip() });
            }
        }
    }
    Ok(steps)
}

/// Cavity readout that ends the hybrid GHZ test: a Ramsey-prepared atom
/// `reader` maps `|±α⟩` onto `g`/`f`, the field is displaced by `+α`, a probe
/// `reader + 1` is post-selected on `a`, and the reader is measured.
pub fn cavity_readout_steps(reader: AtomId, params: &RecipeParams) -> Result<Vec<ProtocolStep>> {
    params.validate()?;
    let mut steps = vec![
        ProtocolStep::AddAtom { levels: LevelPair::Fg, initial: Level::G },
        ProtocolStep::Rotate { atom: reader, rotation: Rotation2::ramsey() },
        ProtocolStep::ConditionalPhase { atom: reader, phi: params.phi },
        ProtocolStep::Inject { beta: c64(params.alpha, 0.0) },
    ];
    steps.extend(probe_steps(AtomId(reader.0 + 1), params.probe_gt()?)?);
    steps.push(ProtocolStep::Measure { atom: reader, basis: LevelPair::Fg, mode: MeasureMode::Sample });
    Ok(steps)
}

/// Bell state preparation starting from `|α⟩`.
pub fn prepare_epr<R: Rng + ?Sized>(variant: EprVariant, params: &RecipeParams, rng: &mut R) -> Result<ProtocolRun> {
    run_protocol(&epr_steps(variant, params)?, params.dim, c64(params.alpha, 0.0), rng)
}

/// GHZ preparation; hybrid mode stops with two atoms entangled with cat states.
pub fn prepare_ghz<R: Rng + ?Sized>(sign: Sign, mode: GhzMode, params: &RecipeParams, rng: &mut R) -> Result<ProtocolRun> {
    run_protocol(&ghz_steps(sign, mode, params)?, params.dim, c64(params.alpha, 0.0), rng)
}

fn equal_pair(space: Space, first: &[Level], second: &[Level], sign: f64) -> CompositeState {
    CompositeState::from_terms(space, &[(first, 0, c64(1.0, 0.0)), (second, 0, c64(sign, 0.0))])
        .expect("basis labels are valid")
}

/// Ideal Bell state on atoms `A1`, `A2`.
pub fn bell_target(variant: EprVariant) -> CompositeState {
    use Level::{F, G};
    let space = Space::atoms_only(LevelPair::Fg, 2);
    match variant {
        EprVariant::PhiPlus => equal_pair(space, &[F, F], &[G, G], 1.0),
        EprVariant::PhiMinus => equal_pair(space, &[F, F], &[G, G], -1.0),
        EprVariant::PsiPlus => equal_pair(space, &[F, G], &[G, F], 1.0),
        EprVariant::PsiMinus => equal_pair(space, &[F, G], &[G, F], -1.0),
    }
}

/// `(|fff⟩ ± |ggg⟩)/√2` on `A1`–`A3`.
pub fn ghz_target(sign: Sign) -> CompositeState {
    use Level::{F, G};
    equal_pair(Space::atoms_only(LevelPair::Fg, 3), &[F, F, F], &[G, G, G], sign.value())
}

/// `½(|ff⟩|+⟩ ± |gg⟩|−⟩)` with raw cats, or `(|ff⟩|+̂⟩ ± |gg⟩|−̂⟩)/√2` with
/// normalized ones.
pub fn hybrid_target(sign: Sign, alpha: f64, dim: usize, normalized_cats: bool) -> Result<CompositeState> {
    let alpha = c64(alpha, 0.0);
    let even = cat_state(alpha, Sign::Plus, dim, normalized_cats)?.state;
    let odd = cat_state(alpha, Sign::Minus, dim, normalized_cats)?.state;
    let weight = if normalized_cats { std::f64::consts::FRAC_1_SQRT_2 } else { 0.5 };
    let slots = (1..=2).map(|k| AtomSlot { id: AtomId(k), levels: LevelPair::Fg }).collect();
    let space = Space::new(slots, dim)?;
    let mut amps = vec![c64(0.0, 0.0); space.len()];
    for n in 0..dim {
        amps[space.basis_index(&[Level::F, Level::F], n)?] = weight * even.amplitudes()[n];
        amps[space.basis_index(&[Level::G, Level::G], n)?] = sign.value() * weight * odd.amplitudes()[n];
    }
    CompositeState::from_unnormalized(space, amps)
}

/// Pure state of the listed atoms, traced over everything else.
pub fn atomic_state(state: &CompositeState, atoms: &[AtomId], purity_tolerance: f64) -> Result<CompositeState> {
    let mask = SubsystemMask::atoms(atoms.iter().map(|a| a.0));
    reduce(state, &mask)?.pure_state(purity_tolerance)
}

/// `⟨t|ρ|t⟩` with `ρ` the reduced state on the atoms of the atoms-only `target`.
pub fn atomic_fidelity(state: &CompositeState, target: &CompositeState) -> Result<f64> {
    let ids: Vec<u32> = target.space().atoms().iter().map(|s| s.id.0).collect();
    reduce(state, &SubsystemMask::atoms(ids))?.fidelity(target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::probe_branches;
    use crate::hilbert::{fidelity, make_coherent, Level};
    use crate::protocol::success_probability_report;
    use crate::Tolerances;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(3)
    }

    fn params() -> RecipeParams {
        RecipeParams::new(2.0, 64)
    }

    #[test]
    fn every_bell_variant_is_reached() {
        for v in EprVariant::ALL {
            let run = prepare_epr(v, &params(), &mut rng()).unwrap();
            let f = atomic_fidelity(&run.final_state, &bell_target(v)).unwrap();
            assert!(f >= 1.0 - 1e-10, "{v}: {f}");
        }
    }

    #[test]
    fn phi_plus_matches_a_hand_built_state() {
        let run = prepare_epr(EprVariant::PhiPlus, &params(), &mut rng()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let space = Space::atoms_only(LevelPair::Fg, 2);
        // |ff⟩, |fg⟩, |gf⟩, |gg⟩
        let hand = CompositeState::from_amplitudes(space, vec![c64(h, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(h, 0.0)]).unwrap();
        let psi = atomic_state(&run.final_state, &[AtomId(1), AtomId(2)], 1e-10).unwrap();
        assert!((fidelity(&psi, &hand).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn bell_outputs_are_orthonormal() {
        let states: Vec<_> = EprVariant::ALL
            .iter()
            .map(|&v| {
                let run = prepare_epr(v, &params(), &mut rng()).unwrap();
                atomic_state(&run.final_state, &[AtomId(1), AtomId(2)], 1e-10).unwrap()
            })
            .collect();
        for (i, a) in states.iter().enumerate() {
            for (j, b) in states.iter().enumerate() {
                let g = a.inner(b).unwrap();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((g - c64(expected, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn measuring_a1_fixes_a2() {
        let run = prepare_epr(EprVariant::PhiPlus, &params(), &mut rng()).unwrap();
        let tol = Tolerances::default();
        for level in [Level::F, Level::G] {
            let m = run.final_state.post_select(AtomId(1), level, &tol).unwrap();
            assert!((m.probability - 0.5).abs() < 1e-10);
            assert!((m.state.level_probability(AtomId(2), level).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn probe_success_matches_the_injected_branch() {
        let p = params();
        let run = prepare_epr(EprVariant::PhiPlus, &p, &mut rng()).unwrap();
        let success = success_probability_report(&run);
        let field = make_coherent(c64(4.0, 0.0), 64).unwrap();
        let p_a = probe_branches(&field, p.probe_gt().unwrap()).unwrap().p_a;
        assert!(p_a >= 0.9);
        // the |0⟩ half of the injected field never excites the probe
        assert!((success - 0.5 * p_a).abs() < 1e-10);
        assert_eq!(run.branch_probability, success);
    }

    #[test]
    fn atomic_ghz_states() {
        for sign in [Sign::Plus, Sign::Minus] {
            let run = prepare_ghz(sign, GhzMode::Atomic, &params(), &mut rng()).unwrap();
            let f = atomic_fidelity(&run.final_state, &ghz_target(sign)).unwrap();
            assert!(f >= 1.0 - 1e-10, "{sign}: {f}");
        }
    }

    #[test]
    fn hybrid_ghz_states() {
        for sign in [Sign::Plus, Sign::Minus] {
            let run = prepare_ghz(sign, GhzMode::Hybrid, &params(), &mut rng()).unwrap();
            let raw = hybrid_target(sign, 2.0, 64, false).unwrap();
            assert!((fidelity(&run.final_state, &raw).unwrap() - 1.0).abs() < 1e-10);
            let normalized = hybrid_target(sign, 2.0, 64, true).unwrap();
            let f = fidelity(&run.final_state, &normalized).unwrap();
            let exact = 0.5 * (1.0 + (1.0 - (-16.0f64).exp()).sqrt());
            assert!((f - exact).abs() < 1e-12);
            assert!(f >= 1.0 - 1e-7);
        }
    }

    #[test]
    fn hybrid_atoms_are_mixed_by_the_cat_overlap() {
        let run = prepare_ghz(Sign::Plus, GhzMode::Hybrid, &params(), &mut rng()).unwrap();
        let block = reduce(&run.final_state, &SubsystemMask::atoms([1, 2])).unwrap();
        let expected = 0.5 * (1.0 + (-16.0f64).exp());
        assert!((block.purity() - expected).abs() < 1e-12);
    }

    #[test]
    fn parameter_validation() {
        assert_eq!(params().probe_gt().unwrap(), PI / 8.0);
        assert_eq!(RecipeParams::new(0.0, 64).validate(), Err(Error::DegenerateCat));
        assert!(RecipeParams::new(-1.0, 64).validate().is_err());
        assert!(RecipeParams::new(2.0, 64).with_gt(-0.1).validate().is_err());
        assert!(matches!(
            prepare_epr(EprVariant::PhiPlus, &RecipeParams::new(2.0, 4), &mut rng()),
            Err(Error::TailMassExceeded { .. })
        ));
    }

    #[test]
    fn variant_names_round_trip() {
        for v in EprVariant::ALL {
            assert_eq!(v.to_string().parse::<EprVariant>().unwrap(), v);
        }
        assert!("chi+".parse::<EprVariant>().is_err());
        assert_eq!("Hybrid".parse::<GhzMode>().unwrap(), GhzMode::Hybrid);
    }
}
