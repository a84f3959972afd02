//! Dense complex Hermitian eigendecomposition by cyclic Jacobi rotations.
//!
//! The matrix is first split into the connected components of its nonzero
//! pattern (exact zeros only), and every block is diagonalized on its own.
//! Qubit Hamiltonians built from Pauli strings are usually block structured
//! (parity sectors, GHZ pairs), so this keeps 8-10 qubit registers cheap.

use nalgebra::DMatrix;

use super::{CMatrix, C64};
use crate::error::{Error, Result};

/// Tolerance for the Hermiticity precondition, relative to `max(1, max|m_ij|)`.
pub const HERMITIAN_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in descending order with the matching orthonormal eigenvectors
/// stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V diag(w) V†`.
    pub fn reconstruct(&self) -> CMatrix {
        self.map_values(|x| x)
    }

    /// `V diag(f(w)) V†`, e.g. matrix square roots and exponentials.
    pub fn map_values<F: Fn(f64) -> f64>(&self, f: F) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (j, &w) in self.values.iter().enumerate() {
            let s = f(w);
            scaled.column_mut(j).scale_mut(s);
        }
        &scaled * self.vectors.adjoint()
    }
}

/// Largest elementwise deviation `|m_ij - conj(m_ji)|`.
pub fn hermiticity_error(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Eigendecomposition of a complex Hermitian matrix.
///
/// Fails with [`Error::NotHermitian`] when the input deviates from Hermitian
/// by more than [`HERMITIAN_TOL`] (scaled by the largest entry when that
/// exceeds one) and with [`Error::DimensionMismatch`] for non-square input.
pub fn hermitian_eigen(m: &CMatrix) -> Result<HermitianEigen> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: m.ncols(),
        });
    }
    let herm_err = hermiticity_error(m);
    if herm_err > HERMITIAN_TOL * max_abs(m).max(1.0) {
        return Err(Error::NotHermitian(herm_err));
    }

    let mut values = vec![0.0; n];
    let mut vectors = CMatrix::zeros(n, n);
    for block in components(m) {
        let k = block.len();
        let mut sub = DMatrix::from_fn(k, k, |i, j| m[(block[i], block[j])]);
        // symmetrize away the (tolerated) anti-Hermitian part
        for j in 0..k {
            for i in 0..j {
                let avg = (sub[(i, j)] + sub[(j, i)].conj()) * 0.5;
                sub[(i, j)] = avg;
                sub[(j, i)] = avg.conj();
            }
            sub[(j, j)] = C64::new(sub[(j, j)].re, 0.0);
        }
        let (w, v) = jacobi(sub);
        for (local, &global_col) in block.iter().enumerate() {
            values[global_col] = w[local];
            for (r, &global_row) in block.iter().enumerate() {
                vectors[(global_row, global_col)] = v[(r, local)];
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let sorted_vectors = CMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    Ok(HermitianEigen {
        values: sorted_values,
        vectors: sorted_vectors,
    })
}

/// Connected components of the nonzero pattern, each sorted ascending, in
/// order of their smallest index.
fn components(m: &CMatrix) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for j in 0..n {
        for i in 0..j {
            if m[(i, j)] != C64::new(0.0, 0.0) || m[(j, i)] != C64::new(0.0, 0.0) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    let (lo, hi) = if ri < rj { (ri, rj) } else { (rj, ri) };
                    parent[hi] = lo;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

/// Cyclic Jacobi on a Hermitian block. Returns unsorted eigenvalues and the
/// accumulated unitary (columns are eigenvectors).
fn jacobi(mut a: CMatrix) -> (Vec<f64>, CMatrix) {
    let n = a.nrows();
    let mut v = CMatrix::identity(n, n);
    if n == 1 {
        return (vec![a[(0, 0)].re], v);
    }
    let total: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if total == 0.0 {
        return (vec![0.0; n], v);
    }
    let target = 1e-15 * total;

    for _sweep in 0..MAX_SWEEPS {
        let off: f64 = {
            let mut s = 0.0;
            for j in 0..n {
                for i in 0..j {
                    s += a[(i, j)].norm_sqr();
                }
            }
            (2.0 * s).sqrt()
        };
        if off <= target {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= 1e-300 || r < 1e-18 * total {
                    continue;
                }
                rotate(&mut a, &mut v, p, q, apq, r);
            }
        }
    }
    let w = (0..n).map(|i| a[(i, i)].re).collect();
    (w, v)
}

/// Applies `G = P R` zeroing `a[p][q]`, where `P` rephases column `q` so the
/// pivot becomes real and `R` is the real symmetric Jacobi rotation.
#[inline]
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize, apq: C64, r: f64) {
    let n = a.nrows();
    let phase = apq / r; // e^{i phi}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let ph_conj = phase.conj(); // e^{-i phi}

    // columns: A <- A G
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * ph_conj * s;
        a[(k, q)] = akp * s + akq * ph_conj * c;
    }
    // rows: A <- G† A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * s + aqk * phase * c;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(app - t * r, 0.0);
    a[(q, q)] = C64::new(aqq + t * r, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * ph_conj * s;
        v[(k, q)] = vkp * s + vkq * ph_conj * c;
    }
}
