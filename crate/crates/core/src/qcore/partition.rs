use super::{c, CMatrix, DensityMatrix, PureState};
use crate::error::{Error, Result};

/// Which side of a bipartition an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Split of an `n_qubits` register into two disjoint, non-empty, ordered
/// qubit lists that together cover every qubit. Within a side, the first
/// listed qubit is the most significant bit of that side's local index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    n_qubits: usize,
    qubits_a: Vec<usize>,
    qubits_b: Vec<usize>,
}

impl Partition {
    pub fn new(n_qubits: usize, qubits_a: Vec<usize>, qubits_b: Vec<usize>) -> Result<Self> {
        if qubits_a.is_empty() || qubits_b.is_empty() {
            return Err(Error::InvalidPartition("both sides must be non-empty".into()));
        }
        let mut seen = vec![false; n_qubits];
        for &q in qubits_a.iter().chain(&qubits_b) {
            if q >= n_qubits {
                return Err(Error::InvalidPartition(format!(
                    "qubit {q} out of range for a {n_qubits}-qubit register"
                )));
            }
            if std::mem::replace(&mut seen[q], true) {
                return Err(Error::InvalidPartition(format!("qubit {q} listed twice")));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidPartition(
                "partition does not cover the register".into(),
            ));
        }
        Ok(Self {
            n_qubits,
            qubits_a,
            qubits_b,
        })
    }

    /// `A = qubits_a`, `B` = the remaining qubits in ascending order.
    pub fn with_complement(n_qubits: usize, qubits_a: Vec<usize>) -> Result<Self> {
        let b = (0..n_qubits).filter(|q| !qubits_a.contains(q)).collect();
        Self::new(n_qubits, qubits_a, b)
    }

    /// `A` = first `n_a` qubits, `B` = the rest.
    pub fn leading(n_qubits: usize, n_a: usize) -> Result<Self> {
        Self::new(n_qubits, (0..n_a).collect(), (n_a..n_qubits).collect())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn qubits(&self, side: Side) -> &[usize] {
        match side {
            Side::A => &self.qubits_a,
            Side::B => &self.qubits_b,
        }
    }

    pub fn dim(&self, side: Side) -> usize {
        1 << self.qubits(side).len()
    }

    fn check_register(&self, n_qubits: usize) -> Result<()> {
        if n_qubits != self.n_qubits {
            return Err(Error::InvalidPartition(format!(
                "partition is for {} qubits, state has {n_qubits}",
                self.n_qubits
            )));
        }
        Ok(())
    }

    /// Full-register index of local indices `(a, b)`.
    pub(crate) fn index_map(&self) -> IndexMap {
        let n = self.n_qubits;
        let spread = |qubits: &[usize]| -> Vec<usize> {
            let k = qubits.len();
            (0..1usize << k)
                .map(|local| {
                    qubits.iter().enumerate().fold(0usize, |acc, (pos, &q)| {
                        let bit = (local >> (k - 1 - pos)) & 1;
                        acc | (bit << (n - 1 - q))
                    })
                })
                .collect()
        };
        IndexMap {
            a: spread(&self.qubits_a),
            b: spread(&self.qubits_b),
        }
    }
}

/// Full index = `a[local_a] | b[local_b]`.
pub(crate) struct IndexMap {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

impl IndexMap {
    #[inline]
    pub fn join(&self, a: usize, b: usize) -> usize {
        self.a[a] | self.b[b]
    }
}

impl PureState {
    /// Amplitudes arranged as a `dim_A x dim_B` matrix, `Psi[a, b] = <a b|psi>`.
    pub fn schmidt_matrix(&self, p: &Partition) -> Result<CMatrix> {
        p.check_register(self.n_qubits())?;
        let map = p.index_map();
        let amps = self.amplitudes();
        Ok(CMatrix::from_fn(map.a.len(), map.b.len(), |a, b| {
            amps[map.join(a, b)]
        }))
    }

    /// Reduced state of one side, computed from the Schmidt matrix.
    pub fn reduced(&self, p: &Partition, keep: Side) -> Result<DensityMatrix> {
        let psi = self.schmidt_matrix(p)?;
        let m = match keep {
            Side::A => &psi * psi.adjoint(),
            Side::B => psi.transpose() * psi.conjugate(),
        };
        Ok(DensityMatrix::from_matrix_unchecked(m))
    }

    /// Inverse of [`PureState::schmidt_matrix`].
    pub fn from_schmidt_matrix(p: &Partition, psi: &CMatrix) -> Result<Self> {
        let map = p.index_map();
        if psi.nrows() != map.a.len() || psi.ncols() != map.b.len() {
            return Err(Error::DimensionMismatch {
                expected: map.a.len() * map.b.len(),
                got: psi.len(),
            });
        }
        let mut amps = vec![c(0.0, 0.0); 1 << p.n_qubits];
        for a in 0..map.a.len() {
            for b in 0..map.b.len() {
                amps[map.join(a, b)] = psi[(a, b)];
            }
        }
        Self::new(p.n_qubits, amps)
    }
}

/// Reduced density matrix of the `keep` side.
pub fn partial_trace(rho: &DensityMatrix, p: &Partition, keep: Side) -> Result<DensityMatrix> {
    p.check_register(rho.n_qubits())?;
    let map = p.index_map();
    let (dk, dt) = match keep {
        Side::A => (map.a.len(), map.b.len()),
        Side::B => (map.b.len(), map.a.len()),
    };
    let full = |kept: usize, traced: usize| match keep {
        Side::A => map.join(kept, traced),
        Side::B => map.join(traced, kept),
    };
    let m = rho.matrix();
    let out = CMatrix::from_fn(dk, dk, |i, j| {
        (0..dt).map(|t| m[(full(i, t), full(j, t))]).sum()
    });
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// `rho^{T_side}` in the full-register basis. Hermitian but possibly indefinite.
pub fn partial_transpose(rho: &DensityMatrix, p: &Partition, side: Side) -> Result<CMatrix> {
    p.check_register(rho.n_qubits())?;
    let map = p.index_map();
    let (da, db) = (map.a.len(), map.b.len());
    let m = rho.matrix();
    let d = rho.dim();
    let mut out = CMatrix::zeros(d, d);
    for a in 0..da {
        for b in 0..db {
            let row = map.join(a, b);
            for a2 in 0..da {
                for b2 in 0..db {
                    let src = match side {
                        Side::A => m[(map.join(a2, b), map.join(a, b2))],
                        Side::B => m[(map.join(a, b2), map.join(a2, b))],
                    };
                    out[(row, map.join(a2, b2))] = src;
                }
            }
        }
    }
    Ok(out)
}
