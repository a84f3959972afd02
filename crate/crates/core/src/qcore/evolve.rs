use super::linalg::{hermitian_eigen, HermitianEigen};
use super::{CMatrix, CVector, DensityMatrix, PureState, C64};
use crate::error::{Error, Result};

/// Exact propagator `exp(-i H t)` from a cached spectral decomposition of `H`.
#[derive(Debug, Clone)]
pub struct Propagator {
    eigen: HermitianEigen,
}

impl Propagator {
    pub fn new(h: &CMatrix) -> Result<Self> {
        Ok(Self {
            eigen: hermitian_eigen(h)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigen.dim()
    }

    pub fn eigen(&self) -> &HermitianEigen {
        &self.eigen
    }

    fn phases(&self, t: f64) -> impl Iterator<Item = C64> + '_ {
        self.eigen.values.iter().map(move |&e| C64::from_polar(1.0, -e * t))
    }

    /// `exp(-i H t)` as a dense matrix.
    pub fn unitary(&self, t: f64) -> CMatrix {
        let v = &self.eigen.vectors;
        let mut scaled = v.clone();
        for (j, ph) in self.phases(t).enumerate() {
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= ph);
        }
        scaled * v.adjoint()
    }

    /// Applies `exp(-i H t)` to a raw vector of matching dimension.
    pub fn apply(&self, v: &CVector, t: f64) -> Result<CVector> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        let vecs = &self.eigen.vectors;
        let mut coeff = vecs.adjoint() * v;
        for (ci, ph) in coeff.iter_mut().zip(self.phases(t)) {
            *ci *= ph;
        }
        Ok(vecs * coeff)
    }

    pub fn evolve(&self, state: &PureState, t: f64) -> Result<PureState> {
        let out = self.apply(state.amplitudes(), t)?;
        Ok(PureState::from_vector_unchecked(state.n_qubits(), out))
    }

    /// `U(t) rho U(t)†`.
    pub fn evolve_density(&self, rho: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        rho.conjugate_by(&self.unitary(t))
    }
}

/// `exp(-i H t) |psi>` with `t` in units of `1/Omega`.
pub fn evolve(state: &PureState, h: &CMatrix, t: f64) -> Result<PureState> {
    if h.nrows() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            got: h.nrows(),
        });
    }
    Propagator::new(h)?.evolve(state, t)
}
