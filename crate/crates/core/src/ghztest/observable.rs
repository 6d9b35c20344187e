use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::c64;
use crate::error::{Error, Result};
use crate::hilbert::{cat_state, AtomId, CompositeState, DensityBlock, Sign, Space};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

/// The triple products `A = σx σy σy`, `B = σy σx σy`, `C = σy σy σx`,
/// `D = σx σx σx`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Mermin {
    A,
    B,
    C,
    D,
}

impl Mermin {
    pub const ALL: [Mermin; 4] = [Mermin::A, Mermin::B, Mermin::C, Mermin::D];

    pub fn axes(self) -> [Axis; 3] {
        use Axis::{X, Y};
        match self {
            Mermin::A => [X, Y, Y],
            Mermin::B => [Y, X, Y],
            Mermin::C => [Y, Y, X],
            Mermin::D => [X, X, X],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ObservableLabel {
    Mermin(Mermin),
    SigmaX(AtomId),
    SigmaY(AtomId),
    SigmaXCavity,
    Custom(String),
}

impl fmt::Display for ObservableLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObservableLabel::Mermin(m) => write!(f, "{m:?}"),
            ObservableLabel::SigmaX(a) => write!(f, "σx({a})"),
            ObservableLabel::SigmaY(a) => write!(f, "σy({a})"),
            ObservableLabel::SigmaXCavity => f.write_str("σx(C)"),
            ObservableLabel::Custom(s) => f.write_str(s),
        }
    }
}

/// Hermitian operator on a composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    pub label: ObservableLabel,
    space: Space,
    matrix: DMatrix<Complex64>,
}

impl Observable {
    pub fn new(label: ObservableLabel, space: Space, matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != space.len() || matrix.ncols() != space.len() {
            return Err(Error::DimensionMismatch {
                expected: space.len(),
                found: matrix.nrows(),
            });
        }
        let obs = Observable { label, space, matrix };
        let err = obs.hermiticity_error();
        if err > 1e-12 {
            return Err(Error::invalid("matrix", format!("not Hermitian (deviation {err:e})")));
        }
        Ok(obs)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `O|ψ⟩`, unnormalized.
    pub fn apply(&self, state: &CompositeState) -> Result<Vec<Complex64>> {
        self.check(state.space())?;
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        Ok((&self.matrix * v).as_slice().to_vec())
    }

    fn check(&self, space: &Space) -> Result<()> {
        if space != &self.space {
            return Err(Error::DimensionMismatch {
                expected: self.space.len(),
                found: space.len(),
            });
        }
        Ok(())
    }
}

/// Product of single-atom Paulis (identity elsewhere, including the field).
fn pauli_product(space: &Space, factors: &[(AtomId, Axis)]) -> Result<DMatrix<Complex64>> {
    let located = factors
        .iter()
        .map(|&(atom, axis)| Ok((space.stride(space.position(atom)?), axis)))
        .collect::<Result<Vec<_>>>()?;
    let len = space.len();
    let mut m = DMatrix::zeros(len, len);
    // each row has exactly one nonzero: flip every factor's bit
    for row in 0..len {
        let mut col = row;
        let mut value = c64(1.0, 0.0);
        for &(stride, axis) in &located {
            let bit = (row / stride) % 2;
            col ^= stride;
            if axis == Axis::Y {
                // σy = −i|f⟩⟨g| + i|g⟩⟨f|
                value *= if bit == 0 { c64(0.0, -1.0) } else { c64(0.0, 1.0) };
            }
        }
        m[(row, col)] = value;
    }
    Ok(m)
}

/// `σx = |f⟩⟨g| + |g⟩⟨f|` or `σy = −i(|f⟩⟨g| − |g⟩⟨f|)` on one atom.
pub fn build_pauli(axis: Axis, atom: AtomId, space: &Space) -> Result<Observable> {
    let label = match axis {
        Axis::X => ObservableLabel::SigmaX(atom),
        Axis::Y => ObservableLabel::SigmaY(atom),
    };
    let matrix = pauli_product(space, &[(atom, axis)])?;
    Observable::new(label, space.clone(), matrix)
}

/// Mermin operator on the three atoms of `space`, in label order.
pub fn build_mermin(which: Mermin, space: &Space) -> Result<Observable> {
    if space.atom_count() != 3 {
        return Err(Error::WrongAtomCount {
            expected: 3,
            found: space.atom_count(),
        });
    }
    let factors: Vec<_> = space.atoms().iter().zip(which.axes()).map(|(s, axis)| (s.id, axis)).collect();
    let matrix = pauli_product(space, &factors)?;
    Observable::new(ObservableLabel::Mermin(which), space.clone(), matrix)
}

/// `|+⟩⟨−| + |−⟩⟨+|` on the field, built from normalized cat states.
pub fn build_cavity_sigma_x(alpha: f64, dim: usize) -> Result<Observable> {
    let a = c64(alpha, 0.0);
    let even = cat_state(a, Sign::Plus, dim, true)?.state;
    let odd = cat_state(a, Sign::Minus, dim, true)?.state;
    let p = nalgebra::DVector::from_column_slice(even.amplitudes());
    let m = nalgebra::DVector::from_column_slice(odd.amplitudes());
    let matrix = &p * m.adjoint() + &m * p.adjoint();
    Observable::new(ObservableLabel::SigmaXCavity, Space::new(Vec::new(), dim)?, matrix)
}

/// `⟨ψ|O|ψ⟩`.
pub fn expectation(obs: &Observable, state: &CompositeState) -> Result<f64> {
    Ok(expectation_complex(obs, state)?.re)
}

/// `⟨ψ|O|ψ⟩` with its (ideally vanishing) imaginary part.
pub fn expectation_complex(obs: &Observable, state: &CompositeState) -> Result<Complex64> {
    let image = obs.apply(state)?;
    Ok(state.amplitudes().iter().zip(&image).map(|(a, b)| a.conj() * b).sum())
}

/// `tr(ρ O)`.
pub fn expectation_density(obs: &Observable, rho: &DensityBlock) -> Result<f64> {
    obs.check(rho.space())?;
    Ok((rho.matrix() * &obs.matrix).trace().re)
}
