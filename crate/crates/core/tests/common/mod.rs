#![allow(dead_code)]

use cavity_ghz::dynamics::{JcParams, Rotation2, RotationKind};
use cavity_ghz::hilbert::{AtomId, LevelPair};
use cavity_ghz::protocol::{MeasureMode, ProtocolStep};
use cavity_ghz::Complex64;
use rand::Rng;

/// A random well-formed pipeline: dim in 24..=32, at most six steps, and a
/// total coherent amplitude (initial plus injections) of at most 1.
pub struct Pipeline {
    pub dim: usize,
    pub alpha: Complex64,
    pub steps: Vec<ProtocolStep>,
}

pub fn random_unitary<R: Rng>(rng: &mut R) -> Rotation2 {
    let theta: f64 = rng.gen_range(0.0..std::f64::consts::FRAC_PI_2);
    let (psi, chi, delta): (f64, f64, f64) = (rng.gen_range(-3.2..3.2), rng.gen_range(-3.2..3.2), rng.gen_range(-3.2..3.2));
    let a = Complex64::from_polar(theta.cos(), psi);
    let b = Complex64::from_polar(theta.sin(), chi);
    let e = Complex64::from_polar(1.0, delta);
    Rotation2::new(RotationKind::Custom, [[a, b], [-e * b.conj(), e * a.conj()]]).expect("SU(2) times a phase")
}

fn random_amplitude<R: Rng>(rng: &mut R, max: f64) -> Complex64 {
    Complex64::from_polar(rng.gen_range(0.0..=max), rng.gen_range(-3.2..3.2))
}

pub fn random_pipeline<R: Rng>(rng: &mut R) -> Pipeline {
    let dim = rng.gen_range(24..=32);
    let alpha = random_amplitude(rng, 0.6);
    let mut budget = 1.0 - alpha.norm();
    let mut atoms: Vec<(AtomId, LevelPair, bool)> = Vec::new();
    let mut steps = Vec::new();
    let len = rng.gen_range(0..=6);
    while steps.len() < len {
        let kind = if atoms.is_empty() { 0 } else { rng.gen_range(0..6) };
        let pick = |rng: &mut R, atoms: &[(AtomId, LevelPair, bool)], want: Option<LevelPair>| {
            let eligible: Vec<_> = atoms.iter().filter(|a| want.is_none_or(|w| a.1 == w)).collect();
            (!eligible.is_empty()).then(|| *eligible[rng.gen_range(0..eligible.len())])
        };
        match kind {
            0 => {
                let levels = if rng.gen_bool(0.5) { LevelPair::Fg } else { LevelPair::Ab };
                let initial = levels.levels()[rng.gen_range(0..2)];
                atoms.push((AtomId(atoms.len() as u32 + 1), levels, false));
                steps.push(ProtocolStep::AddAtom { levels, initial });
            }
            1 => {
                let (atom, _, _) = pick(rng, &atoms, None).unwrap();
                steps.push(ProtocolStep::Rotate { atom, rotation: random_unitary(rng) });
            }
            2 => {
                if let Some((atom, _, _)) = pick(rng, &atoms, Some(LevelPair::Fg)) {
                    steps.push(ProtocolStep::ConditionalPhase { atom, phi: rng.gen_range(-7.0..7.0) });
                }
            }
            3 => {
                if let Some((atom, _, _)) = pick(rng, &atoms, Some(LevelPair::Ab)) {
                    let params = JcParams::new(rng.gen_range(0.0..2.0), rng.gen_range(0.0..4.0), rng.gen_range(-5.0..5.0)).unwrap();
                    steps.push(ProtocolStep::ResonantProbe { atom, params });
                }
            }
            4 => {
                let beta = random_amplitude(rng, budget);
                budget -= beta.norm();
                steps.push(ProtocolStep::Inject { beta });
            }
            _ => {
                let open: Vec<_> = atoms.iter().filter(|a| !a.2).map(|a| a.0).collect();
                if !open.is_empty() {
                    let atom = open[rng.gen_range(0..open.len())];
                    let slot = atoms.iter_mut().find(|a| a.0 == atom).unwrap();
                    slot.2 = true;
                    steps.push(ProtocolStep::Measure { atom, basis: slot.1, mode: MeasureMode::Sample });
                }
            }
        }
    }
    Pipeline { dim, alpha, steps }
}
