//! Exact dense simulation primitives for small qubit registers.
//!
//! Basis labels put qubit 0 in the most significant bit, so `|q0 q1 ... q(n-1)>`
//! has index `sum_k q_k 2^(n-1-k)`. Subsystems named by a [`Partition`] may be
//! arbitrary, non-contiguous index sets; reshuffling is handled internally.

mod evolve;
mod linalg;
mod partition;
mod state;

pub use evolve::{evolve, Propagator};
pub use linalg::{hermitian_eigen, hermiticity_error, HermitianEigen, HERMITIAN_TOL};
pub use partition::{partial_trace, partial_transpose, Partition, Side};
pub use state::{
    dm_from_pure, expectation, fidelity, tensor_product, DensityMatrix, PureState, Spectrum,
    EIGEN_CLIP,
};

pub type C64 = num_complex::Complex64;
pub type CMatrix = nalgebra::DMatrix<C64>;
pub type CVector = nalgebra::DVector<C64>;

/// Largest register handled by the protocol and the CLI.
pub const MAX_QUBITS: usize = 10;

pub(crate) const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub(crate) fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0f64, |acc, (x, y)| acc.max((x - y).norm()))
}
