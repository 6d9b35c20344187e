use std::collections::BTreeMap;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::lhv::{lhv_prediction, qm_prediction};
use crate::dynamics::Rotation2;
use crate::error::{Error, Result};
use crate::hilbert::{AtomId, Level, LevelPair, Sign};
use crate::protocol::{
    branch_tree, cavity_readout_steps, path_key, prepare_ghz, BranchTree, GhzMode, MeasureMode, ProtocolStep,
    RecipeParams,
};

/// Below this an expected branch probability counts as forbidden.
const FORBIDDEN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// Every shot gave the quantum eigenvalue.
    #[serde(rename = "QM")]
    QuantumMechanics,
    /// Every shot gave the local-realist value.
    #[serde(rename = "LHV")]
    LocalRealism,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::QuantumMechanics => "QM",
            Verdict::LocalRealism => "LHV",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GhzTestResult {
    pub sign: Sign,
    pub mode: GhzMode,
    pub shots: u64,
    pub seed: u64,
    /// Detection letters of `A1`, `A2`, `A3` (e.g. `"gfg"`), every possible key present.
    pub branch_counts: BTreeMap<String, u64>,
    pub expected_probabilities: BTreeMap<String, f64>,
    /// `σx¹σx²σx³` value of each shot, in shot order.
    pub shot_products: Vec<i8>,
    pub qm_prediction: i8,
    pub lhv_prediction: i8,
    pub verdict: Verdict,
}

impl GhzTestResult {
    pub fn frequency(&self, key: &str) -> f64 {
        self.branch_counts.get(key).copied().unwrap_or(0) as f64 / self.shots as f64
    }

    /// Shots that landed on a branch of zero expected probability.
    pub fn forbidden_count(&self) -> u64 {
        self.branch_counts
            .iter()
            .filter(|(k, _)| self.expected_probabilities.get(*k).copied().unwrap_or(0.0) < FORBIDDEN)
            .map(|(_, &c)| c)
            .sum()
    }

    pub fn all_products_match_qm(&self) -> bool {
        self.shot_products.iter().all(|&p| p == self.qm_prediction)
    }
}

/// The four detection sequences allowed for each sign, read as
/// `(K₁, A1)(K₂, A2)(third party)` with the third party read after `K₃`
/// (atomic) or through the cavity readout (hybrid).
pub fn allowed_branches(sign: Sign) -> [&'static str; 4] {
    match sign {
        Sign::Plus => ["ggg", "gff", "ffg", "fgf"],
        Sign::Minus => ["ggf", "gfg", "fff", "fgg"],
    }
}

/// `g ↔ +1`, `f ↔ −1`, multiplied over the detections.
pub fn branch_product(key: &str) -> i8 {
    key.chars().map(|c| if c == 'f' { -1 } else { 1 }).product()
}

/// Rotations and detections that follow the prepared state.
pub fn analysis_steps(mode: GhzMode, params: &RecipeParams) -> Result<Vec<ProtocolStep>> {
    let read = |atom: AtomId| {
        [
            ProtocolStep::Rotate { atom, rotation: Rotation2::analysis() },
            ProtocolStep::Measure { atom, basis: LevelPair::Fg, mode: MeasureMode::Sample },
        ]
    };
    let mut steps: Vec<_> = read(AtomId(1)).into_iter().chain(read(AtomId(2))).collect();
    match mode {
        GhzMode::Atomic => steps.extend(read(AtomId(3))),
        GhzMode::Hybrid => steps.extend(cavity_readout_steps(AtomId(3), params)?),
    }
    Ok(steps)
}

/// Measurement tree of the full test; the prepared state is deterministic,
/// so only the analysis measurements branch.
pub fn ghz_branch_tree(sign: Sign, mode: GhzMode, params: &RecipeParams) -> Result<BranchTree> {
    // the preparation only post-selects, so this stream is never drawn from
    let prepared = prepare_ghz(sign, mode, params, &mut ChaCha8Rng::seed_from_u64(0))?;
    branch_tree(&prepared.final_state, &analysis_steps(mode, params)?)
}

/// Exact probability of each detection key.
pub fn expected_branch_probabilities(tree: &BranchTree) -> BTreeMap<String, f64> {
    let mut map = BTreeMap::new();
    for o in tree.outcomes() {
        *map.entry(o.key()).or_insert(0.0) += o.probability;
    }
    map
}

/// Shot `i` draws from ChaCha8 seeded with `seed` on stream `i`.
pub fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}

pub fn run_ghz_test(sign: Sign, mode: GhzMode, shots: u64, params: &RecipeParams, seed: u64) -> Result<GhzTestResult> {
    if shots == 0 {
        return Err(Error::invalid("shots", "must be at least 1"));
    }
    let tree = ghz_branch_tree(sign, mode, params)?;
    let expected = expected_branch_probabilities(&tree);
    let keys: Vec<String> = (0..shots)
        .into_par_iter()
        .map(|i| path_key(&tree.sample(&mut shot_rng(seed, i))))
        .collect();

    let mut branch_counts: BTreeMap<String, u64> = expected.keys().map(|k| (k.clone(), 0)).collect();
    for k in &keys {
        *branch_counts.entry(k.clone()).or_insert(0) += 1;
    }
    let shot_products: Vec<i8> = keys.iter().map(|k| branch_product(k)).collect();
    let (qm, lhv) = (qm_prediction(sign), lhv_prediction(sign));
    let verdict = if shot_products.iter().all(|&p| p == qm) {
        Verdict::QuantumMechanics
    } else if shot_products.iter().all(|&p| p == lhv) {
        Verdict::LocalRealism
    } else {
        Verdict::Inconclusive
    };
    Ok(GhzTestResult {
        sign,
        mode,
        shots,
        seed,
        branch_counts,
        expected_probabilities: expected,
        shot_products,
        qm_prediction: qm,
        lhv_prediction: lhv,
        verdict,
    })
}

/// Letter for a detected level, for building keys by hand.
pub fn level_letter(level: Level) -> char {
    level.to_string().chars().next().unwrap_or('?')
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::rotate;
    use crate::hilbert::CompositeState;
    use crate::protocol::ghz_target;

    fn params() -> RecipeParams {
        RecipeParams::new(2.0, 64)
    }

    fn nonzero(map: &BTreeMap<String, f64>) -> Vec<&str> {
        map.iter().filter(|(_, &p)| p > FORBIDDEN).map(|(k, _)| k.as_str()).collect()
    }

    #[test]
    fn allowed_branches_match_the_tables() {
        for mode in [GhzMode::Atomic, GhzMode::Hybrid] {
            for sign in [Sign::Plus, Sign::Minus] {
                let tree = ghz_branch_tree(sign, mode, &params()).unwrap();
                let map = expected_branch_probabilities(&tree);
                let mut allowed = allowed_branches(sign).to_vec();
                allowed.sort();
                assert_eq!(nonzero(&map), allowed, "{sign} {mode}");
                for key in allowed {
                    assert!((map[key] - 0.25).abs() < 1e-10);
                    assert_eq!(branch_product(key), qm_prediction(sign));
                }
                assert!((tree.total_probability() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn sequential_readout_equals_joint_born_rule() {
        for sign in [Sign::Plus, Sign::Minus] {
            let mut psi: CompositeState = ghz_target(sign);
            for k in 1..=3 {
                psi = rotate(&psi, AtomId(k), &Rotation2::analysis()).unwrap();
            }
            let tree = ghz_branch_tree(sign, GhzMode::Atomic, &params()).unwrap();
            let map = expected_branch_probabilities(&tree);
            let letters = [Level::F, Level::G];
            for &l1 in &letters {
                for &l2 in &letters {
                    for &l3 in &letters {
                        let joint = psi.amplitude(&[l1, l2, l3], 0).unwrap().norm_sqr();
                        let key: String = [l1, l2, l3].iter().map(|&l| level_letter(l)).collect();
                        assert!((map[&key] - joint).abs() < 1e-12, "{key}");
                    }
                }
            }
        }
    }

    #[test]
    fn shots_follow_quantum_mechanics() {
        for sign in [Sign::Plus, Sign::Minus] {
            let r = run_ghz_test(sign, GhzMode::Atomic, 4000, &params(), 99).unwrap();
            assert_eq!(r.verdict, Verdict::QuantumMechanics);
            assert_eq!(r.forbidden_count(), 0);
            assert_eq!(r.branch_counts.values().sum::<u64>(), 4000);
            let bound = 4.0 * (0.25f64 * 0.75 / 4000.0).sqrt();
            for key in allowed_branches(sign) {
                assert!((r.frequency(key) - 0.25).abs() <= bound, "{key}: {}", r.frequency(key));
            }
            assert_eq!(r.lhv_prediction, -r.qm_prediction);
        }
    }

    #[test]
    fn shots_are_reproducible() {
        let a = run_ghz_test(Sign::Minus, GhzMode::Hybrid, 300, &params(), 7).unwrap();
        let b = run_ghz_test(Sign::Minus, GhzMode::Hybrid, 300, &params(), 7).unwrap();
        assert_eq!(a, b);
        assert!(a.all_products_match_qm());
        let c = run_ghz_test(Sign::Minus, GhzMode::Hybrid, 300, &params(), 8).unwrap();
        assert_ne!(a.shot_products.len(), 0);
        assert_ne!(a.branch_counts, c.branch_counts);
    }

    #[test]
    fn zero_shots_rejected() {
        assert!(matches!(
            run_ghz_test(Sign::Plus, GhzMode::Atomic, 0, &params(), 1),
            Err(Error::InvalidParameter { .. })
        ));
    }
}
