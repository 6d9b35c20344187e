use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use super::{AtomId, AtomState, FieldState, Level, LevelPair};
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AtomSlot {
    pub id: AtomId,
    pub levels: LevelPair,
}

/// Shape of a composite system: atoms in ascending label order plus one
/// field mode. `field_dim = 1` stands for "no field".
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Space {
    atoms: Vec<AtomSlot>,
    field_dim: usize,
}

impl Space {
    pub fn new(mut atoms: Vec<AtomSlot>, field_dim: usize) -> Result<Self> {
        if field_dim == 0 {
            return Err(Error::invalid("dim", "field truncation must be at least 1"));
        }
        atoms.sort_by_key(|s| s.id);
        if let Some(w) = atoms.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::DuplicateAtom(w[0].id));
        }
        Ok(Space { atoms, field_dim })
    }

    /// Atoms `A1 … Am` sharing one level pair, without a field.
    pub fn atoms_only(levels: LevelPair, count: u32) -> Self {
        let atoms = (1..=count).map(|i| AtomSlot { id: AtomId(i), levels }).collect();
        Space { atoms, field_dim: 1 }
    }

    pub fn atoms(&self) -> &[AtomSlot] {
        &self.atoms
    }

    pub fn field_dim(&self) -> usize {
        self.field_dim
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    /// Total Hilbert-space dimension `2^m · dim`.
    pub fn len(&self) -> usize {
        (1usize << self.atoms.len()) * self.field_dim
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn position(&self, id: AtomId) -> Result<usize> {
        self.atoms
            .iter()
            .position(|s| s.id == id)
            .ok_or(Error::UnknownAtom(id))
    }

    pub fn slot(&self, id: AtomId) -> Result<AtomSlot> {
        self.position(id).map(|p| self.atoms[p])
    }

    /// Distance in the flat vector between the two levels of the atom at `pos`.
    pub(crate) fn stride(&self, pos: usize) -> usize {
        (1usize << (self.atoms.len() - 1 - pos)) * self.field_dim
    }

    /// Flat index of `(bits, n)`; `bits[k]` addresses the k-th atom in order.
    pub fn flat_index(&self, bits: &[usize], n: usize) -> usize {
        debug_assert_eq!(bits.len(), self.atoms.len());
        debug_assert!(n < self.field_dim);
        let atom_part = bits.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1));
        atom_part * self.field_dim + n
    }

    /// Inverse of [`Space::flat_index`].
    pub fn split_index(&self, index: usize) -> (Vec<usize>, usize) {
        let n = index % self.field_dim;
        let mut atom_part = index / self.field_dim;
        let m = self.atoms.len();
        let mut bits = vec![0; m];
        for k in (0..m).rev() {
            bits[k] = atom_part & 1;
            atom_part >>= 1;
        }
        (bits, n)
    }

    /// Flat index of a basis state given by level names.
    pub fn basis_index(&self, levels: &[Level], n: usize) -> Result<usize> {
        if levels.len() != self.atoms.len() {
            return Err(Error::WrongAtomCount {
                expected: self.atoms.len(),
                found: levels.len(),
            });
        }
        if n >= self.field_dim {
            return Err(Error::DimensionMismatch {
                expected: self.field_dim,
                found: n + 1,
            });
        }
        let bits = levels
            .iter()
            .zip(&self.atoms)
            .map(|(&l, s)| {
                s.levels
                    .bit_of(l)
                    .ok_or_else(|| Error::invalid("level", format!("{l} is not in {} of {}", s.levels, s.id)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.flat_index(&bits, n))
    }

    /// Pairs of flat indices `(i0, i1)` differing only in the atom at `pos`,
    /// `i0` holding the first-listed level.
    pub(crate) fn level_pairs(&self, pos: usize) -> impl Iterator<Item = (usize, usize)> {
        let stride = self.stride(pos);
        let blocks = 1usize << pos;
        (0..blocks).flat_map(move |hi| {
            let base = hi * 2 * stride;
            (0..stride).map(move |lo| (base + lo, base + lo + stride))
        })
    }
}

/// Normalized joint state of atoms and the cavity field.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeState {
    space: Space,
    amps: Vec<Complex64>,
}

/// Outcome of a projective measurement on one atom.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub outcome: Level,
    /// Born probability of `outcome` before collapse.
    pub probability: f64,
    pub state: CompositeState,
}

impl CompositeState {
    /// Wraps amplitudes that are already unit-norm (within 1e-10).
    pub fn from_amplitudes(space: Space, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != space.len() {
            return Err(Error::DimensionMismatch {
                expected: space.len(),
                found: amps.len(),
            });
        }
        let state = CompositeState { space, amps };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > Tolerances::default().norm {
            return Err(Error::NormDrift { norm });
        }
        Ok(state)
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn from_unnormalized(space: Space, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != space.len() {
            return Err(Error::DimensionMismatch {
                expected: space.len(),
                found: amps.len(),
            });
        }
        let mut state = CompositeState { space, amps };
        state.renormalize()?;
        Ok(state)
    }

    /// Superposition of labelled basis states, normalized afterwards.
    pub fn from_terms(space: Space, terms: &[(&[Level], usize, Complex64)]) -> Result<Self> {
        let mut amps = vec![Complex64::new(0.0, 0.0); space.len()];
        for (levels, n, c) in terms {
            amps[space.basis_index(levels, *n)?] += c;
        }
        Self::from_unnormalized(space, amps)
    }

    /// Field-only state with no atoms.
    pub fn field_only(field: &FieldState) -> Result<Self> {
        let space = Space::new(Vec::new(), field.dim())?;
        Self::from_amplitudes(space, field.amplitudes().to_vec())
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.field_dim
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn amplitude(&self, levels: &[Level], n: usize) -> Result<Complex64> {
        Ok(self.amps[self.space.basis_index(levels, n)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &CompositeState) -> Result<Complex64> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch {
                expected: self.space.len(),
                found: other.space.len(),
            });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    fn renormalize(&mut self) -> Result<()> {
        let norm = self.norm_sqr();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NormDrift { norm });
        }
        let s = 1.0 / norm.sqrt();
        self.amps.iter_mut().for_each(|c| *c *= s);
        Ok(())
    }

    /// Tensor product with one more atom, inserted at its label position.
    pub fn with_atom(&self, atom: &AtomState) -> Result<Self> {
        let mut slots = self.space.atoms.clone();
        slots.push(AtomSlot {
            id: atom.id,
            levels: atom.levels,
        });
        let space = Space::new(slots, self.space.field_dim)?;
        let pos = space.position(atom.id)?;
        let stride = space.stride(pos);
        let [c0, c1] = atom.amplitudes();
        let mut amps = vec![Complex64::new(0.0, 0.0); space.len()];
        // old index = hi * stride + lo; new index inserts the atom bit between.
        for (old, &c) in self.amps.iter().enumerate() {
            let hi = old / stride;
            let lo = old % stride;
            let base = hi * 2 * stride + lo;
            amps[base] = c * c0;
            amps[base + stride] = c * c1;
        }
        Ok(CompositeState { space, amps })
    }

    /// Field-marginal population of the top Fock level.
    pub fn field_tail_mass(&self) -> f64 {
        let dim = self.space.field_dim;
        if dim <= 1 {
            return 0.0;
        }
        self.amps
            .iter()
            .skip(dim - 1)
            .step_by(dim)
            .map(|c| c.norm_sqr())
            .sum()
    }

    /// Born probability of finding `atom` in `level`.
    pub fn level_probability(&self, atom: AtomId, level: Level) -> Result<f64> {
        let (pos, bit) = self.locate(atom, level)?;
        Ok(self
            .space
            .level_pairs(pos)
            .map(|(i0, i1)| self.amps[if bit == 0 { i0 } else { i1 }].norm_sqr())
            .sum())
    }

    fn locate(&self, atom: AtomId, level: Level) -> Result<(usize, usize)> {
        let pos = self.space.position(atom)?;
        let levels = self.space.atoms[pos].levels;
        let bit = levels
            .bit_of(level)
            .ok_or_else(|| Error::invalid("level", format!("{level} is not in {levels} of {atom}")))?;
        Ok((pos, bit))
    }

    fn check_basis(&self, atom: AtomId, basis: LevelPair) -> Result<()> {
        let found = self.space.slot(atom)?.levels;
        if found != basis {
            return Err(Error::WrongLevelPair {
                atom,
                expected: basis,
                found,
            });
        }
        Ok(())
    }

    /// Projects onto `level` of `atom` and renormalizes.
    pub fn post_select(&self, atom: AtomId, level: Level, tol: &Tolerances) -> Result<Measurement> {
        let (pos, bit) = self.locate(atom, level)?;
        let probability = self.level_probability(atom, level)?;
        if probability < tol.zero_probability {
            return Err(Error::ZeroProbabilityBranch {
                atom,
                outcome: level,
                probability,
            });
        }
        let mut amps = self.amps.clone();
        for (i0, i1) in self.space.level_pairs(pos) {
            amps[if bit == 0 { i1 } else { i0 }] = Complex64::new(0.0, 0.0);
        }
        let mut state = CompositeState {
            space: self.space.clone(),
            amps,
        };
        state.renormalize()?;
        Ok(Measurement {
            outcome: level,
            probability,
            state,
        })
    }

    /// Born-rule measurement of `atom` in `basis`; draws one uniform number.
    pub fn measure<R: Rng + ?Sized>(&self, atom: AtomId, basis: LevelPair, rng: &mut R) -> Result<Measurement> {
        self.check_basis(atom, basis)?;
        let [first, second] = basis.levels();
        let p_first = self.level_probability(atom, first)?;
        let u: f64 = rng.gen();
        let outcome = if u < p_first { first } else { second };
        self.post_select(atom, outcome, &Tolerances::default())
    }
}

/// Tensor product `atoms ⊗ field` in ascending label order.
pub fn compose(atoms: &[AtomState], field: &FieldState) -> Result<CompositeState> {
    let norm = field.norm_sqr();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NormDrift { norm });
    }
    let mut state = CompositeState::field_only(field)?;
    for atom in atoms {
        state = state.with_atom(atom)?;
    }
    Ok(state)
}

/// Samples an outcome of `atom` in `basis` with Born probabilities.
pub fn measure_atom<R: Rng + ?Sized>(
    state: &CompositeState,
    atom: AtomId,
    basis: LevelPair,
    rng: &mut R,
) -> Result<Measurement> {
    state.measure(atom, basis, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::hilbert::make_coherent;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fg(id: u32, level: Level) -> AtomState {
        AtomState::basis(AtomId(id), LevelPair::Fg, level).unwrap()
    }

    #[test]
    fn compose_basis_product() {
        let vac = FieldState::vacuum(5).unwrap();
        let s = compose(&[fg(1, Level::G)], &vac).unwrap();
        let idx = s.space().basis_index(&[Level::G], 0).unwrap();
        for (i, c) in s.amplitudes().iter().enumerate() {
            let expected = if i == idx { 1.0 } else { 0.0 };
            assert_eq!(*c, c64(expected, 0.0));
        }
    }

    #[test]
    fn compose_superposition_is_normalized() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let atom = AtomState::new(AtomId(1), LevelPair::Fg, [c64(h, 0.0), c64(h, 0.0)]).unwrap();
        let s = compose(&[atom], &make_coherent(c64(1.5, 0.0), 32).unwrap()).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn compose_orders_by_label_and_round_trips() {
        let dim = 6;
        let field = FieldState::fock(3, dim).unwrap();
        let s = compose(&[fg(2, Level::F), fg(1, Level::G)], &field).unwrap();
        assert_eq!(s.amplitudes().len(), 4 * dim);
        assert_eq!(s.space().atoms()[0].id, AtomId(1));
        let idx = s.space().basis_index(&[Level::G, Level::F], 3).unwrap();
        assert_eq!(s.amplitudes()[idx], c64(1.0, 0.0));
        for i in 0..s.space().len() {
            let (bits, n) = s.space().split_index(i);
            assert_eq!(s.space().flat_index(&bits, n), i);
        }
    }

    #[test]
    fn index_bijection_exhaustive() {
        for m in 0..=3u32 {
            for dim in 1..=16 {
                let space = Space::new(
                    (1..=m).map(|i| AtomSlot { id: AtomId(i), levels: LevelPair::Fg }).collect(),
                    dim,
                )
                .unwrap();
                let mut seen = vec![false; space.len()];
                for code in 0..(1usize << m) {
                    let bits: Vec<usize> = (0..m as usize).map(|k| (code >> (m as usize - 1 - k)) & 1).collect();
                    for n in 0..dim {
                        let i = space.flat_index(&bits, n);
                        assert!(!seen[i]);
                        seen[i] = true;
                        assert_eq!(space.split_index(i), (bits.clone(), n));
                    }
                }
                assert!(seen.into_iter().all(|x| x));
            }
        }
    }

    #[test]
    fn inserting_a_middle_label_matches_direct_compose() {
        let field = make_coherent(c64(0.7, 0.2), 16).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let a2 = AtomState::new(AtomId(2), LevelPair::Ab, [c64(h, 0.0), c64(0.0, h)]).unwrap();
        let direct = compose(&[fg(1, Level::F), a2.clone(), fg(3, Level::G)], &field).unwrap();
        let late = compose(&[fg(1, Level::F), fg(3, Level::G)], &field)
            .unwrap()
            .with_atom(&a2)
            .unwrap();
        assert_eq!(direct, late);
    }

    #[test]
    fn eigenstate_measurement_is_certain() {
        let field = make_coherent(c64(1.0, 0.0), 24).unwrap();
        let s = compose(&[fg(1, Level::F)], &field).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let m = measure_atom(&s, AtomId(1), LevelPair::Fg, &mut rng).unwrap();
            assert_eq!(m.outcome, Level::F);
            assert_eq!(m.probability, 1.0);
        }
    }

    #[test]
    fn equal_superposition_has_half_probability() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let atom = AtomState::new(AtomId(1), LevelPair::Fg, [c64(h, 0.0), c64(h, 0.0)]).unwrap();
        let s = compose(&[atom], &make_coherent(c64(2.0, 0.0), 64).unwrap()).unwrap();
        assert!((s.level_probability(AtomId(1), Level::F).unwrap() - 0.5).abs() < 1e-12);
        let m = s.post_select(AtomId(1), Level::G, &Tolerances::default()).unwrap();
        assert!((m.probability - 0.5).abs() < 1e-12);
        assert!((m.state.norm_sqr() - 1.0).abs() < 1e-12);
        assert!((m.state.level_probability(AtomId(1), Level::G).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_probability_post_selection_fails() {
        let s = compose(&[fg(1, Level::G)], &FieldState::vacuum(3).unwrap()).unwrap();
        assert!(matches!(
            s.post_select(AtomId(1), Level::F, &Tolerances::default()),
            Err(Error::ZeroProbabilityBranch { .. })
        ));
    }

    #[test]
    fn measurement_checks_basis_and_atom() {
        let s = compose(&[fg(1, Level::G)], &FieldState::vacuum(3).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            s.measure(AtomId(1), LevelPair::Ab, &mut rng),
            Err(Error::WrongLevelPair { .. })
        ));
        assert!(matches!(
            s.measure(AtomId(7), LevelPair::Fg, &mut rng),
            Err(Error::UnknownAtom(_))
        ));
    }

    #[test]
    fn sampled_frequencies_follow_born_rule() {
        let atom = AtomState::new(AtomId(1), LevelPair::Fg, [c64(0.6, 0.0), c64(0.0, 0.8)]).unwrap();
        let s = compose(&[atom], &FieldState::vacuum(2).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 20_000;
        let hits = (0..n)
            .filter(|_| s.measure(AtomId(1), LevelPair::Fg, &mut rng).unwrap().outcome == Level::F)
            .count();
        let freq = hits as f64 / n as f64;
        assert!((freq - 0.36).abs() < 4.0 * (0.36f64 * 0.64 / n as f64).sqrt());
    }
}
