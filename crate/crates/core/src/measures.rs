//! Bipartite entanglement measures and the two-qubit maximal-entanglement
//! bounds expressed through a density matrix's spectrum.

use crate::error::{Error, Result};
use crate::qcore::{
    c, hermitian_eigen, partial_transpose, CMatrix, DensityMatrix, Partition, Side, Spectrum,
};

/// Results below this are round-off and reported as exactly zero by the
/// spectrum-based bounds.
const ROUNDOFF: f64 = 1e-14;

const RANK_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasureKind {
    Tsallis(u32),
    LinearEntropy,
    NegativityRaw,
    NegativityNormalized,
    Concurrence,
    MaxConcurrence,
    MaxNegativity,
}

impl MeasureKind {
    /// Measures whose range is `[0, 1]` by construction.
    pub fn is_normalized(self) -> bool {
        !matches!(self, MeasureKind::Tsallis(_) | MeasureKind::NegativityRaw)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureValue {
    pub kind: MeasureKind,
    pub value: f64,
}

fn clipped_eigenvalues(rho: &DensityMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(rho.matrix())?
        .values
        .into_iter()
        .map(|v| v.max(0.0))
        .collect())
}

/// Tsallis entropy `(1 - Tr rho^q) / (q - 1)`; `q = 1` is the von Neumann
/// limit `-sum l ln l`.
pub fn tsallis_entropy(rho: &DensityMatrix, q: u32) -> Result<f64> {
    match q {
        0 => Err(Error::Domain("Tsallis index q must be >= 1".into())),
        1 => Ok(-clipped_eigenvalues(rho)?
            .into_iter()
            .filter(|&l| l > 0.0)
            .map(|l| l * l.ln())
            .sum::<f64>()),
        2 => Ok(1.0 - rho.purity()),
        _ => {
            let tr: f64 = clipped_eigenvalues(rho)?
                .into_iter()
                .map(|l| l.powi(q as i32))
                .sum();
            Ok((1.0 - tr) / (q as f64 - 1.0))
        }
    }
}

/// Normalized linear entropy `N/(N-1) (1 - Tr rho^2)` with `N` the Hilbert
/// space dimension of `rho`.
pub fn linear_entropy(rho: &DensityMatrix) -> Result<f64> {
    let n = rho.dim() as f64;
    if rho.dim() < 2 {
        return Err(Error::Domain("linear entropy needs dimension >= 2".into()));
    }
    Ok((n / (n - 1.0) * (1.0 - rho.purity())).clamp(0.0, 1.0))
}

/// Sum of the magnitudes of the negative eigenvalues of `rho^{T_A}`.
pub fn negativity_raw(rho: &DensityMatrix, p: &Partition) -> Result<f64> {
    let pt = partial_transpose(rho, p, Side::A)?;
    Ok(hermitian_eigen(&pt)?
        .values
        .into_iter()
        .filter(|&v| v < 0.0)
        .map(|v| -v)
        .sum())
}

/// `negativity_raw / ((d_min - 1) / 2)` with `d_min = min(dim_A, dim_B)`.
pub fn negativity_normalized(rho: &DensityMatrix, p: &Partition) -> Result<f64> {
    let d_min = p.dim(Side::A).min(p.dim(Side::B)) as f64;
    Ok(negativity_raw(rho, p)? / ((d_min - 1.0) / 2.0))
}

/// Negativity of a pure bipartite state from its Schmidt spectrum:
/// `((sum sqrt l)^2 - 1) / 2`.
pub fn negativity_from_schmidt(spec: &Spectrum) -> f64 {
    let s: f64 = spec.values().iter().map(|l| l.sqrt()).sum();
    ((s * s - 1.0) / 2.0).max(0.0)
}

fn sigma_y_sigma_y() -> CMatrix {
    let mut s = CMatrix::zeros(4, 4);
    s[(0, 3)] = c(-1.0, 0.0);
    s[(1, 2)] = c(1.0, 0.0);
    s[(2, 1)] = c(1.0, 0.0);
    s[(3, 0)] = c(-1.0, 0.0);
    s
}

/// Wootters concurrence `max(0, m1 - m2 - m3 - m4)`, the `m_j` being the
/// descending square roots of the eigenvalues of `rho S rho* S`.
///
/// They are computed as the singular values of `W^T S W` with
/// `rho = W W^dagger`, `W = V diag(sqrt l)`; eigenvalues at or below
/// `RANK_TOL` are dropped so round-off never passes through a square root.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::Domain(format!(
            "concurrence needs a two-qubit state, got dimension {}",
            rho.dim()
        )));
    }
    let eig = hermitian_eigen(rho.matrix())?;
    let keep: Vec<usize> = (0..4).filter(|&j| eig.values[j] > RANK_TOL).collect();
    let w = CMatrix::from_fn(4, keep.len(), |i, k| {
        eig.vectors[(i, keep[k])] * eig.values[keep[k]].sqrt()
    });
    let tau = w.transpose() * sigma_y_sigma_y() * &w;
    let mut mu: Vec<f64> = tau.singular_values().iter().copied().collect();
    mu.sort_by(|a, b| b.total_cmp(a));
    mu.resize(4, 0.0);
    Ok((mu[0] - mu[1] - mu[2] - mu[3]).clamp(0.0, 1.0))
}

fn snap(v: f64) -> f64 {
    if v <= ROUNDOFF {
        0.0
    } else {
        v.min(1.0)
    }
}

/// Largest concurrence reachable by a global unitary on a two-qubit state
/// with this spectrum: `max(0, l1 - l3 - 2 sqrt(l2 l4))`.
pub fn max_concurrence(spec: &Spectrum) -> Result<f64> {
    let [l1, l2, l3, l4] = spec.four()?;
    Ok(snap(l1 - l3 - 2.0 * (l2 * l4).sqrt()))
}

/// Largest normalized negativity reachable by a global unitary:
/// `max(0, sqrt((l1 - l3)^2 + (l2 - l4)^2) - l2 - l4)`.
pub fn max_negativity(spec: &Spectrum) -> Result<f64> {
    Ok(max_negativity_of(spec.four()?))
}

pub(crate) fn max_negativity_of([l1, l2, l3, l4]: [f64; 4]) -> f64 {
    snap((l1 - l3).hypot(l2 - l4) - l2 - l4)
}

/// Normalized A|B negativity of a `2 + N` pure state whose two-qubit side has
/// this spectrum: `(1/3) sum_{i != j} sqrt(l_i l_j)`.
#[allow(non_snake_case)]
pub fn negativity_2pN_from_spectrum(spec: &Spectrum) -> Result<f64> {
    Ok(negativity_2pn_of(spec.four()?))
}

pub(crate) fn negativity_2pn_of(l: [f64; 4]) -> f64 {
    let mut sum = 0.0;
    for i in 0..4 {
        for j in i + 1..4 {
            sum += (l[i] * l[j]).sqrt();
        }
    }
    (2.0 * sum / 3.0).min(1.0)
}
