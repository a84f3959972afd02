use super::linalg::hermitian_eigen;
use super::{c, CMatrix, CVector, C64};
use crate::error::{Error, Result};

/// Reduced-density eigenvalues in `[-EIGEN_CLIP, 0)` are treated as round-off
/// and clipped to zero before entropy or negativity formulas.
pub const EIGEN_CLIP: f64 = 1e-10;

const NORM_TOL: f64 = 1e-12;
const DM_TOL: f64 = 1e-12;
const SPECTRUM_SUM_TOL: f64 = 1e-10;

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::InvalidState(format!(
            "dimension {dim} is not a power of two"
        )));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Normalized amplitude vector of an `n_qubits` register.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: CVector,
}

impl PureState {
    /// Checks the length and that the norm is one within `1e-12`.
    pub fn new(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << n_qubits,
                got: amplitudes.len(),
            });
        }
        let amplitudes = CVector::from_vec(amplitudes);
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("norm is {norm}, expected 1")));
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        let v = CVector::from_vec(amplitudes);
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Self::new(n_qubits, (v / c(norm, 0.0)).iter().copied().collect())
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::InvalidState(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amps = vec![c(0.0, 0.0); dim];
        amps[index] = c(1.0, 0.0);
        Self::new(n_qubits, amps)
    }

    /// Every qubit in `|1> = |down>`, i.e. the all-ones basis label.
    pub fn all_down(n_qubits: usize) -> Self {
        Self::basis(n_qubits, (1 << n_qubits) - 1).expect("index in range")
    }

    pub(crate) fn from_vector_unchecked(n_qubits: usize, amplitudes: CVector) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << n_qubits);
        Self {
            n_qubits,
            amplitudes,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }
}

/// `|a> ⊗ |b>`; the qubits of `a` take the lower (more significant) indices.
pub fn tensor_product(a: &PureState, b: &PureState) -> PureState {
    let amps = a.amplitudes.kronecker(&b.amplitudes);
    PureState::from_vector_unchecked(a.n_qubits + b.n_qubits, amps)
}

/// `|<a|b>|^2`.
pub fn fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

/// Hermitian, positive semidefinite, unit-trace matrix on `n_qubits`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity and trace within `1e-12` and eigenvalues `>= -1e-10`.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        let n_qubits = qubits_for_dim(matrix.nrows())?;
        let herm = super::hermiticity_error(&matrix);
        if herm > DM_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > DM_TOL || tr.im.abs() > DM_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let eig = hermitian_eigen(&matrix)?;
        let min = eig.values.last().copied().unwrap_or(0.0);
        if min < -EIGEN_CLIP {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite (min eigenvalue {min:e})"
            )));
        }
        Ok(Self { n_qubits, matrix })
    }

    /// Skips validation; for matrices that are density matrices by construction.
    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        let n_qubits = matrix.nrows().trailing_zeros() as usize;
        Self { n_qubits, matrix }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        Self::from_matrix_unchecked(CMatrix::identity(d, d) * c(1.0 / d as f64, 0.0))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// `Tr(rho^2)`, computed as the squared Frobenius norm.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Descending eigenvalues with round-off negatives clipped to zero.
    pub fn spectrum(&self) -> Result<Spectrum> {
        let eig = hermitian_eigen(&self.matrix)?;
        Spectrum::from_unsorted(eig.values)
    }

    /// `U rho U†`.
    pub fn conjugate_by(&self, unitary: &CMatrix) -> Result<Self> {
        if unitary.nrows() != self.dim() || unitary.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: unitary.nrows(),
            });
        }
        Ok(Self::from_matrix_unchecked(
            unitary * &self.matrix * unitary.adjoint(),
        ))
    }
}

/// `|psi><psi|`.
pub fn dm_from_pure(state: &PureState) -> DensityMatrix {
    let v = &state.amplitudes;
    DensityMatrix::from_matrix_unchecked(v * v.adjoint())
}

/// `Re Tr(rho O)`.
pub fn expectation(rho: &DensityMatrix, observable: &CMatrix) -> Result<f64> {
    if observable.nrows() != rho.dim() || observable.ncols() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: observable.nrows(),
        });
    }
    let m = &rho.matrix;
    let mut acc = c(0.0, 0.0);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            acc += m[(i, j)] * observable[(j, i)];
        }
    }
    Ok(acc.re)
}

/// Non-increasing eigenvalues of a density matrix, each in `[0, 1]`,
/// summing to one within `1e-10`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Rejects unsorted input; see [`Spectrum::from_unsorted`].
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("empty spectrum".into()));
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Domain(format!(
                "spectrum {values:?} is not in descending order"
            )));
        }
        let mut values = values;
        for v in values.iter_mut() {
            if !v.is_finite() || *v < -EIGEN_CLIP || *v > 1.0 + EIGEN_CLIP {
                return Err(Error::Domain(format!("eigenvalue {v} outside [0, 1]")));
            }
            *v = v.clamp(0.0, 1.0);
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > SPECTRUM_SUM_TOL {
            return Err(Error::Domain(format!("eigenvalues sum to {sum}, expected 1")));
        }
        Ok(Self { values })
    }

    /// Sorts descending, then validates.
    pub fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        values.sort_by(|a, b| b.total_cmp(a));
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of entries above `1e-12`.
    pub fn rank(&self) -> usize {
        self.values.iter().filter(|&&v| v > 1e-12).count()
    }

    /// Exactly four entries, as required by the two-qubit bounds.
    pub(crate) fn four(&self) -> Result<[f64; 4]> {
        <[f64; 4]>::try_from(self.values.as_slice()).map_err(|_| {
            Error::Domain(format!(
                "expected a length-4 spectrum, got length {}",
                self.values.len()
            ))
        })
    }
}
