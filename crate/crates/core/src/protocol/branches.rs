use rand::Rng;

use super::step::{apply_coherent_step, validate_steps, MeasureMode, ProtocolStep};
use crate::error::Result;
use crate::hilbert::{AtomId, CompositeState, Level};
use crate::tolerance::Tolerances;

/// Every outcome sequence of the sampled measurements in a step list.
///
/// Post-selected measurements are applied as conditioning and do not branch.
/// Outcomes below the zero-probability tolerance are kept as dead ends.
#[derive(Debug, Clone, PartialEq)]
pub enum BranchTree {
    Leaf,
    Split {
        atom: AtomId,
        outcomes: [Level; 2],
        /// Conditional probabilities given the path so far.
        probabilities: [f64; 2],
        children: [Option<Box<BranchTree>>; 2],
    },
}

/// One root-to-leaf path.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchOutcome {
    pub path: Vec<(AtomId, Level)>,
    pub probability: f64,
}

impl BranchOutcome {
    /// Outcome letters in measurement order, e.g. `"gfg"`.
    pub fn key(&self) -> String {
        path_key(&self.path)
    }
}

pub fn path_key(path: &[(AtomId, Level)]) -> String {
    path.iter().map(|(_, l)| l.to_string()).collect()
}

impl BranchTree {
    /// All paths, in first-level-first order, with their probabilities.
    pub fn outcomes(&self) -> Vec<BranchOutcome> {
        let mut out = Vec::new();
        self.collect(&mut Vec::new(), 1.0, &mut out);
        out
    }

    fn collect(&self, prefix: &mut Vec<(AtomId, Level)>, p: f64, out: &mut Vec<BranchOutcome>) {
        match self {
            BranchTree::Leaf => out.push(BranchOutcome {
                path: prefix.clone(),
                probability: p,
            }),
            BranchTree::Split {
                atom,
                outcomes,
                probabilities,
                children,
            } => {
                for k in 0..2 {
                    prefix.push((*atom, outcomes[k]));
                    match &children[k] {
                        Some(child) => child.collect(prefix, p * probabilities[k], out),
                        None => out.push(BranchOutcome {
                            path: prefix.clone(),
                            probability: p * probabilities[k],
                        }),
                    }
                    prefix.pop();
                }
            }
        }
    }

    pub fn total_probability(&self) -> f64 {
        self.outcomes().iter().map(|o| o.probability).sum()
    }

    /// Walks the tree drawing one uniform number per split, with the same
    /// first-level-if-below rule as [`CompositeState::measure`].
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<(AtomId, Level)> {
        let mut path = Vec::new();
        let mut node = self;
        while let BranchTree::Split {
            atom,
            outcomes,
            probabilities,
            children,
        } = node
        {
            let u: f64 = rng.gen();
            let k = if u < probabilities[0] { 0 } else { 1 };
            path.push((*atom, outcomes[k]));
            match &children[k] {
                Some(child) => node = child,
                None => break,
            }
        }
        path
    }
}

/// Expands the sampled measurements of `steps`, starting from `initial`.
pub fn branch_tree(initial: &CompositeState, steps: &[ProtocolStep]) -> Result<BranchTree> {
    validate_steps(initial.space(), steps)?;
    expand(initial.clone(), steps, &Tolerances::default())
}

fn expand(mut state: CompositeState, steps: &[ProtocolStep], tol: &Tolerances) -> Result<BranchTree> {
    for (i, step) in steps.iter().enumerate() {
        match *step {
            ProtocolStep::Measure { atom, mode: MeasureMode::PostSelect(level), .. } => {
                state = state.post_select(atom, level, tol)?.state;
            }
            ProtocolStep::Measure { atom, basis, mode: MeasureMode::Sample } => {
                let outcomes = basis.levels();
                let mut probabilities = [0.0; 2];
                let mut children: [Option<Box<BranchTree>>; 2] = [None, None];
                for k in 0..2 {
                    probabilities[k] = state.level_probability(atom, outcomes[k])?;
                    if probabilities[k] >= tol.zero_probability {
                        let next = state.post_select(atom, outcomes[k], tol)?.state;
                        children[k] = Some(Box::new(expand(next, &steps[i + 1..], tol)?));
                    }
                }
                return Ok(BranchTree::Split {
                    atom,
                    outcomes,
                    probabilities,
                    children,
                });
            }
            _ => state = apply_coherent_step(&state, step, tol)?,
        }
    }
    Ok(BranchTree::Leaf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::dynamics::Rotation2;
    use crate::hilbert::{make_coherent, LevelPair};
    use crate::protocol::run_steps;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn three_measurements() -> (CompositeState, Vec<ProtocolStep>) {
        let field = make_coherent(c64(1.1, 0.0), 24).unwrap();
        let initial = CompositeState::field_only(&field).unwrap();
        let mut steps = Vec::new();
        for k in 1..=3 {
            steps.push(ProtocolStep::AddAtom { levels: LevelPair::Fg, initial: Level::G });
            steps.push(ProtocolStep::Rotate { atom: AtomId(k), rotation: Rotation2::ramsey() });
            steps.push(ProtocolStep::ConditionalPhase { atom: AtomId(k), phi: 0.9 * k as f64 });
            steps.push(ProtocolStep::Rotate { atom: AtomId(k), rotation: Rotation2::ramsey() });
        }
        for k in 1..=3 {
            steps.push(ProtocolStep::Measure { atom: AtomId(k), basis: LevelPair::Fg, mode: MeasureMode::Sample });
        }
        (initial, steps)
    }

    #[test]
    fn branch_probabilities_sum_to_one() {
        let (initial, steps) = three_measurements();
        let tree = branch_tree(&initial, &steps).unwrap();
        let outcomes = tree.outcomes();
        assert_eq!(outcomes.len(), 8);
        assert!((tree.total_probability() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn tree_walk_matches_direct_execution() {
        let (initial, steps) = three_measurements();
        let tree = branch_tree(&initial, &steps).unwrap();
        for seed in 0..50 {
            let walked = tree.sample(&mut ChaCha8Rng::seed_from_u64(seed));
            let run = run_steps(&initial, &steps, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let direct: Vec<_> = run.records.iter().map(|r| (r.atom, r.outcome)).collect();
            assert_eq!(walked, direct);
            let p: f64 = tree
                .outcomes()
                .iter()
                .find(|o| o.path == direct)
                .map(|o| o.probability)
                .unwrap();
            assert!((p - run.branch_probability).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic_outcomes_end_the_branch() {
        let initial = CompositeState::field_only(&make_coherent(c64(0.0, 0.0), 4).unwrap()).unwrap();
        let steps = [
            ProtocolStep::AddAtom { levels: LevelPair::Fg, initial: Level::G },
            ProtocolStep::Measure { atom: AtomId(1), basis: LevelPair::Fg, mode: MeasureMode::Sample },
        ];
        let outcomes = branch_tree(&initial, &steps).unwrap().outcomes();
        assert_eq!(outcomes.len(), 2);
        assert_eq!(outcomes[0].key(), "f");
        assert_eq!(outcomes[0].probability, 0.0);
        assert_eq!(outcomes[1].key(), "g");
        assert_eq!(outcomes[1].probability, 1.0);
    }
}
