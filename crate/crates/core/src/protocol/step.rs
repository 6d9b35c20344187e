use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{apply_conditional_phase, apply_jc, rotate, JcParams, Rotation2};
use crate::error::{Error, Result};
use crate::hilbert::{make_coherent_with, AtomId, AtomState, CompositeState, Level, LevelPair, Space};
use crate::tolerance::Tolerances;

/// How a measurement step picks its outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "outcome", rename_all = "snake_case")]
pub enum MeasureMode {
    /// Born-rule draw from the step's random stream.
    Sample,
    /// Forced outcome; its probability is recorded.
    PostSelect(Level),
}

/// One instruction of a preparation or measurement sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum ProtocolStep {
    /// New atom in a basis level. Labels are assigned in creation order,
    /// continuing after the largest label already present (first atom is `A1`).
    AddAtom { levels: LevelPair, initial: Level },
    Rotate { atom: AtomId, rotation: Rotation2 },
    ConditionalPhase { atom: AtomId, phi: f64 },
    ResonantProbe { atom: AtomId, params: JcParams },
    /// Displace the cavity by `beta`.
    Inject { beta: Complex64 },
    Measure { atom: AtomId, basis: LevelPair, mode: MeasureMode },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasurementRecord {
    pub atom: AtomId,
    pub outcome: Level,
    /// Probability of `outcome` at the moment of measurement.
    pub probability: f64,
    pub post_selected: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolRun {
    pub final_state: CompositeState,
    /// In execution order.
    pub records: Vec<MeasurementRecord>,
    /// Product of every realized outcome probability.
    pub branch_probability: f64,
}

impl ProtocolRun {
    pub fn record(&self, atom: AtomId) -> Option<&MeasurementRecord> {
        self.records.iter().find(|r| r.atom == atom)
    }
}

pub(crate) fn next_label(space: &Space) -> AtomId {
    AtomId(space.atoms().iter().map(|s| s.id.0).max().unwrap_or(0) + 1)
}

fn require_finite(name: &'static str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite, got {x}")))
    }
}

/// Checks a step list against the atoms present in `space` without running it.
pub fn validate_steps(space: &Space, steps: &[ProtocolStep]) -> Result<()> {
    let mut present: BTreeMap<AtomId, LevelPair> = space.atoms().iter().map(|s| (s.id, s.levels)).collect();
    let mut measured = BTreeSet::new();
    let mut next = next_label(space);
    let lookup = |present: &BTreeMap<AtomId, LevelPair>, atom: AtomId| {
        present.get(&atom).copied().ok_or(Error::UnknownAtom(atom))
    };
    let expect = |atom: AtomId, found: LevelPair, expected: LevelPair| {
        if found == expected {
            Ok(())
        } else {
            Err(Error::WrongLevelPair { atom, expected, found })
        }
    };
    for step in steps {
        match *step {
            ProtocolStep::AddAtom { levels, initial } => {
                if levels.bit_of(initial).is_none() {
                    return Err(Error::invalid("initial", format!("{initial} is not a level of {levels}")));
                }
                present.insert(next, levels);
                next = AtomId(next.0 + 1);
            }
            ProtocolStep::Rotate { atom, rotation } => {
                lookup(&present, atom)?;
                let deviation = rotation.unitarity_deviation();
                if deviation > Tolerances::default().unitarity {
                    return Err(Error::NonUnitaryRotation { deviation });
                }
            }
            ProtocolStep::ConditionalPhase { atom, phi } => {
                expect(atom, lookup(&present, atom)?, LevelPair::Fg)?;
                require_finite("phi", phi)?;
            }
            ProtocolStep::ResonantProbe { atom, params } => {
                expect(atom, lookup(&present, atom)?, LevelPair::Ab)?;
                JcParams::new(params.g, params.t, params.delta)?;
            }
            ProtocolStep::Inject { beta } => {
                require_finite("beta", beta.re)?;
                require_finite("beta", beta.im)?;
            }
            ProtocolStep::Measure { atom, basis, mode } => {
                expect(atom, lookup(&present, atom)?, basis)?;
                if let MeasureMode::PostSelect(level) = mode {
                    if basis.bit_of(level).is_none() {
                        return Err(Error::invalid("outcome", format!("{level} is not a level of {basis}")));
                    }
                }
                if !measured.insert(atom) {
                    return Err(Error::AlreadyMeasured(atom));
                }
            }
        }
    }
    Ok(())
}

/// Applies a step that involves no measurement.
pub(crate) fn apply_coherent_step(state: &CompositeState, step: &ProtocolStep, tol: &Tolerances) -> Result<CompositeState> {
    use crate::dynamics::Displace;
    match *step {
        ProtocolStep::AddAtom { levels, initial } => {
            let atom = AtomState::basis(next_label(state.space()), levels, initial)?;
            state.with_atom(&atom)
        }
        ProtocolStep::Rotate { atom, ref rotation } => rotate(state, atom, rotation),
        ProtocolStep::ConditionalPhase { atom, phi } => apply_conditional_phase(state, atom, phi),
        ProtocolStep::ResonantProbe { atom, params } => apply_jc(state, atom, params),
        ProtocolStep::Inject { beta } => state.displace_with(beta, tol),
        ProtocolStep::Measure { .. } => unreachable!("measurement steps are handled by the caller"),
    }
}

/// Runs `steps` from an arbitrary starting state.
pub fn run_steps<R: Rng + ?Sized>(initial: &CompositeState, steps: &[ProtocolStep], rng: &mut R) -> Result<ProtocolRun> {
    run_steps_with(initial, steps, rng, &Tolerances::default())
}

pub fn run_steps_with<R: Rng + ?Sized>(
    initial: &CompositeState,
    steps: &[ProtocolStep],
    rng: &mut R,
    tol: &Tolerances,
) -> Result<ProtocolRun> {
    validate_steps(initial.space(), steps)?;
    let mut state = initial.clone();
    let mut records = Vec::new();
    let mut branch_probability = 1.0;
    for step in steps {
        state = match *step {
            ProtocolStep::Measure { atom, basis, mode } => {
                let (m, post_selected) = match mode {
                    MeasureMode::Sample => (state.measure(atom, basis, rng)?, false),
                    MeasureMode::PostSelect(level) => (state.post_select(atom, level, tol)?, true),
                };
                branch_probability *= m.probability;
                records.push(MeasurementRecord {
                    atom,
                    outcome: m.outcome,
                    probability: m.probability,
                    post_selected,
                });
                m.state
            }
            _ => apply_coherent_step(&state, step, tol)?,
        };
    }
    Ok(ProtocolRun {
        final_state: state,
        records,
        branch_probability,
    })
}

/// Runs `steps` with the cavity starting in `|alpha⟩` and no atoms.
pub fn run_protocol<R: Rng + ?Sized>(
    steps: &[ProtocolStep],
    dim: usize,
    alpha: Complex64,
    rng: &mut R,
) -> Result<ProtocolRun> {
    validate_steps(&Space::new(Vec::new(), dim)?, steps)?;
    let tol = Tolerances::default();
    let field = make_coherent_with(alpha, dim, &tol)?;
    let initial = CompositeState::field_only(&field)?;
    run_steps_with(&initial, steps, rng, &tol)
}

/// Product of the post-selected outcome probabilities; 1 when there are none.
pub fn success_probability_report(run: &ProtocolRun) -> f64 {
    run.records.iter().filter(|r| r.post_selected).map(|r| r.probability).product()
}
