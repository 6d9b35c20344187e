use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{CompositeState, FieldState};
use crate::tolerance::Tolerances;

/// `exp(β a† − β* a)` on the truncated Fock space.
///
/// The exponential is taken of the truncated generator, so `D(β)D(−β) = I`
/// holds exactly and the Weyl phase of `D(β)|α⟩ = e^{i Im(βα*)}|α+β⟩` is kept.
pub fn displacement_matrix(beta: Complex64, dim: usize) -> DMatrix<Complex64> {
    let mut gen = DMatrix::<Complex64>::zeros(dim, dim);
    for n in 0..dim.saturating_sub(1) {
        let root = ((n + 1) as f64).sqrt();
        gen[(n + 1, n)] = beta * root;
        gen[(n, n + 1)] = -beta.conj() * root;
    }
    gen.exp()
}

/// Field displacement, applied to the field factor of a state.
pub trait Displace: Sized {
    fn displace_with(&self, beta: Complex64, tol: &Tolerances) -> Result<Self>;

    fn displace(&self, beta: Complex64) -> Result<Self> {
        self.displace_with(beta, &Tolerances::default())
    }
}

fn check_tail(tail: f64, tol: &Tolerances) -> Result<()> {
    if tail > tol.tail {
        return Err(Error::TailMassExceeded {
            tail,
            tolerance: tol.tail,
        });
    }
    Ok(())
}

impl Displace for FieldState {
    fn displace_with(&self, beta: Complex64, tol: &Tolerances) -> Result<Self> {
        let d = displacement_matrix(beta, self.dim());
        let v = nalgebra::DVector::from_column_slice(self.amplitudes());
        let out = FieldState::from_amplitudes((d * v).as_slice().to_vec())?;
        if self.dim() > 1 {
            check_tail(out.tail_mass(), tol)?;
        }
        Ok(out)
    }
}

impl Displace for CompositeState {
    fn displace_with(&self, beta: Complex64, tol: &Tolerances) -> Result<Self> {
        let dim = self.dim();
        let d = displacement_matrix(beta, dim);
        let mut out = self.clone();
        for block in out.amplitudes_mut().chunks_mut(dim) {
            let v = nalgebra::DVector::from_column_slice(block);
            block.copy_from_slice((&d * v).as_slice());
        }
        check_tail(out.field_tail_mass(), tol)?;
        Ok(out)
    }
}

pub fn displace<S: Displace>(state: &S, beta: Complex64) -> Result<S> {
    state.displace(beta)
}
