//! Twisting and GHZ-generating Hamiltonians, embedded on a qubit subset of a
//! larger register.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::qcore::{c, hermiticity_error, CMatrix};

/// Commutator residual below which a symmetry is considered present.
pub const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HamiltonianKind {
    /// One-axis twisting, `Omega J_x^2`.
    Oat,
    /// One-axis twisting with transverse field, `Omega J_x^2 + omega J_z`.
    Tf,
    /// Two-axis twisting, `Omega (J_x J_y + J_y J_x)`.
    Tat,
    /// `Omega prod_i sigma_i^x`.
    Ghz,
}

impl HamiltonianKind {
    pub const ALL: [HamiltonianKind; 4] = [Self::Oat, Self::Tf, Self::Tat, Self::Ghz];

    pub fn name(self) -> &'static str {
        match self {
            Self::Oat => "oat",
            Self::Tf => "tf",
            Self::Tat => "tat",
            Self::Ghz => "ghz",
        }
    }
}

impl fmt::Display for HamiltonianKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HamiltonianKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown Hamiltonian kind `{s}` (expected oat, tf, tat or ghz)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pauli {
    X,
    Y,
    Z,
}

fn pauli(p: Pauli) -> CMatrix {
    let z = c(0.0, 0.0);
    let (a, b, cc, d) = match p {
        Pauli::X => (z, c(1.0, 0.0), c(1.0, 0.0), z),
        Pauli::Y => (z, c(0.0, -1.0), c(0.0, 1.0), z),
        Pauli::Z => (c(1.0, 0.0), z, z, c(-1.0, 0.0)),
    };
    CMatrix::from_row_slice(2, 2, &[a, b, cc, d])
}

/// Tensor product over the register of the given single-qubit Paulis,
/// identity on every other qubit.
fn pauli_string(n_total: usize, factors: &[(usize, Pauli)]) -> CMatrix {
    let id = CMatrix::identity(2, 2);
    (0..n_total).fold(CMatrix::identity(1, 1), |acc, q| {
        let local = factors.iter().find(|(k, _)| *k == q).map_or_else(|| id.clone(), |(_, p)| pauli(*p));
        acc.kronecker(&local)
    })
}

fn collective(n_total: usize, subset: &[usize], p: Pauli) -> CMatrix {
    let dim = 1usize << n_total;
    subset
        .iter()
        .fold(CMatrix::zeros(dim, dim), |acc, &q| acc + pauli_string(n_total, &[(q, p)]) * c(0.5, 0.0))
}

/// `J_x^2 = |S|/4 + 1/2 sum_{i<j} sigma_i^x sigma_j^x`
fn jx_squared(n_total: usize, subset: &[usize]) -> CMatrix {
    let dim = 1usize << n_total;
    let mut m = CMatrix::identity(dim, dim) * c(subset.len() as f64 / 4.0, 0.0);
    for (k, &i) in subset.iter().enumerate() {
        for &j in &subset[k + 1..] {
            m += pauli_string(n_total, &[(i, Pauli::X), (j, Pauli::X)]) * c(0.5, 0.0);
        }
    }
    m
}

/// `J_x J_y + J_y J_x = 1/2 sum_{i<j} (sigma_i^x sigma_j^y + sigma_i^y sigma_j^x)`
fn jxjy_anticommutator(n_total: usize, subset: &[usize]) -> CMatrix {
    let dim = 1usize << n_total;
    let mut m = CMatrix::zeros(dim, dim);
    for (k, &i) in subset.iter().enumerate() {
        for &j in &subset[k + 1..] {
            m += pauli_string(n_total, &[(i, Pauli::X), (j, Pauli::Y)]) * c(0.5, 0.0);
            m += pauli_string(n_total, &[(i, Pauli::Y), (j, Pauli::X)]) * c(0.5, 0.0);
        }
    }
    m
}

#[derive(Debug, Clone)]
pub struct Hamiltonian {
    kind: HamiltonianKind,
    omega: f64,
    omega_z: f64,
    subset: Vec<usize>,
    n_total: usize,
    matrix: CMatrix,
}

impl Hamiltonian {
    /// Builds `kind` on `subset` of an `n_total`-qubit register, with the
    /// transverse field of the TF model equal to `omega`.
    pub fn build(kind: HamiltonianKind, omega: f64, subset: &[usize], n_total: usize) -> Result<Self> {
        Self::build_with_transverse(kind, omega, omega, subset, n_total)
    }

    /// Builds `kind` acting on every qubit of an `n`-qubit register.
    pub fn on_register(kind: HamiltonianKind, omega: f64, n: usize) -> Result<Self> {
        Self::build(kind, omega, &(0..n).collect::<Vec<_>>(), n)
    }

    pub fn build_with_transverse(
        kind: HamiltonianKind,
        omega: f64,
        omega_z: f64,
        subset: &[usize],
        n_total: usize,
    ) -> Result<Self> {
        if subset.is_empty() {
            return Err(Error::Domain("Hamiltonian subset must be non-empty".into()));
        }
        if n_total > crate::qcore::MAX_QUBITS {
            return Err(Error::ResourceCap { requested: n_total, cap: crate::qcore::MAX_QUBITS });
        }
        let mut seen = vec![false; n_total];
        for &q in subset {
            if q >= n_total || seen[q] {
                return Err(Error::Domain(format!(
                    "invalid subset {subset:?} for a {n_total}-qubit register"
                )));
            }
            seen[q] = true;
        }
        if !omega.is_finite() || !omega_z.is_finite() {
            return Err(Error::Domain("couplings must be finite".into()));
        }
        let w = c(omega, 0.0);
        let matrix = match kind {
            HamiltonianKind::Oat => jx_squared(n_total, subset) * w,
            HamiltonianKind::Tf => {
                jx_squared(n_total, subset) * w + collective(n_total, subset, Pauli::Z) * c(omega_z, 0.0)
            }
            HamiltonianKind::Tat => jxjy_anticommutator(n_total, subset) * w,
            HamiltonianKind::Ghz => {
                let factors: Vec<_> = subset.iter().map(|&q| (q, Pauli::X)).collect();
                pauli_string(n_total, &factors) * w
            }
        };
        Ok(Self {
            kind,
            omega,
            omega_z,
            subset: subset.to_vec(),
            n_total,
            matrix,
        })
    }

    pub fn kind(&self) -> HamiltonianKind {
        self.kind
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn omega_z(&self) -> f64 {
        self.omega_z
    }

    pub fn subset(&self) -> &[usize] {
        &self.subset
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.matrix)
    }

    /// Collective `J_x`, `J_y`, `J_z` over this Hamiltonian's subset,
    /// embedded on the full register.
    pub fn subset_spin(&self) -> [CMatrix; 3] {
        [Pauli::X, Pauli::Y, Pauli::Z].map(|p| collective(self.n_total, &self.subset, p))
    }
}

fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryCheck {
    pub residual: f64,
    pub holds: bool,
}

impl SymmetryCheck {
    fn new(residual: f64) -> Self {
        Self { residual, holds: residual <= SYMMETRY_TOL }
    }
}

/// Which discrete and continuous symmetries a Hamiltonian has on its subset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryReport {
    /// Antiunitary `J -> -J`: `Y conj(H) Y^dagger = H` with `Y = prod sigma^y`.
    pub spin_flip: SymmetryCheck,
    /// `[H, J_x] = 0`.
    pub x_rotation: SymmetryCheck,
    /// `e^{i pi J_z} H e^{-i pi J_z} = H`, i.e. `J_x, J_y -> -J_x, -J_y`.
    pub z_parity: SymmetryCheck,
}

pub fn symmetry_report(h: &Hamiltonian) -> SymmetryReport {
    let n = h.n_total;
    let m = &h.matrix;
    let ys: Vec<_> = h.subset.iter().map(|&q| (q, Pauli::Y)).collect();
    let zs: Vec<_> = h.subset.iter().map(|&q| (q, Pauli::Z)).collect();
    let y = pauli_string(n, &ys);
    let z = pauli_string(n, &zs);
    let flipped = &y * m.conjugate() * y.adjoint();
    let jx = collective(n, &h.subset, Pauli::X);
    // e^{i pi J_z} equals prod sigma^z up to a global phase
    let parity = &z * m * z.adjoint();
    SymmetryReport {
        spin_flip: SymmetryCheck::new(frobenius(&(flipped - m))),
        x_rotation: SymmetryCheck::new(frobenius(&(m * &jx - &jx * m))),
        z_parity: SymmetryCheck::new(frobenius(&(parity - m))),
    }
}

/// Frobenius norm of `[H, J^2]` with `J` the collective spin of the whole
/// register.
pub fn total_spin_commutator(h: &Hamiltonian) -> f64 {
    let all: Vec<usize> = (0..h.n_total).collect();
    let j = [Pauli::X, Pauli::Y, Pauli::Z].map(|p| collective(h.n_total, &all, p));
    let j2 = j.iter().fold(CMatrix::zeros(h.matrix.nrows(), h.matrix.ncols()), |acc, a| acc + a * a);
    frobenius(&(&h.matrix * &j2 - &j2 * &h.matrix))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::max_abs_diff;
    use crate::spin::collective_ops;

    #[test]
    fn ghz_single_qubit_is_sigma_x() {
        let h = Hamiltonian::on_register(HamiltonianKind::Ghz, 0.7, 1).unwrap();
        assert!(max_abs_diff(h.matrix(), &(pauli(Pauli::X) * c(0.7, 0.0))) == 0.0);
    }

    #[test]
    fn ghz_squares_to_identity() {
        for n in 1..=5 {
            for subset in [vec![0], (0..n).collect::<Vec<_>>(), (0..n).rev().step_by(2).collect()] {
                let h = Hamiltonian::build(HamiltonianKind::Ghz, 1.0, &subset, n).unwrap();
                let sq = h.matrix() * h.matrix();
                let d = 1 << n;
                assert_eq!(max_abs_diff(&sq, &CMatrix::identity(d, d)), 0.0);
            }
        }
    }

    #[test]
    fn twisting_matches_spin_operator_algebra() {
        for n in 1..=5 {
            let ops = collective_ops(n).unwrap();
            let (jx, jy, jz) = (ops.jx(), ops.jy(), ops.jz());
            let omega = 1.3;
            let w = c(omega, 0.0);
            let oat = jx * jx * w;
            let tat = (jx * jy + jy * jx) * w;
            let tf = &oat + jz * c(0.4, 0.0);
            let got = |k| Hamiltonian::on_register(k, omega, n).unwrap().into_matrix();
            assert!(max_abs_diff(&got(HamiltonianKind::Oat), &oat) < 1e-12);
            assert!(max_abs_diff(&got(HamiltonianKind::Tat), &tat) < 1e-12);
            let all: Vec<usize> = (0..n).collect();
            let tf_built = Hamiltonian::build_with_transverse(HamiltonianKind::Tf, omega, 0.4, &all, n).unwrap();
            assert!(max_abs_diff(tf_built.matrix(), &tf) < 1e-12);
        }
    }

    #[test]
    fn hermitian_and_local_to_subset() {
        let n = 4;
        let subset = [2, 0];
        for kind in HamiltonianKind::ALL {
            let h = Hamiltonian::build(kind, 0.9, &subset, n).unwrap();
            assert!(h.hermiticity_error() < 1e-12);
            for q in [1, 3] {
                for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                    let s = pauli_string(n, &[(q, p)]);
                    assert!(frobenius(&(h.matrix() * &s - &s * h.matrix())) < 1e-12, "{kind} on {q}");
                }
            }
        }
    }

    #[test]
    fn symmetries() {
        let n = 4;
        let rep = |k| symmetry_report(&Hamiltonian::on_register(k, 1.0, n).unwrap());
        let oat = rep(HamiltonianKind::Oat);
        assert!(oat.x_rotation.holds && oat.spin_flip.holds && oat.z_parity.holds);
        let tat = rep(HamiltonianKind::Tat);
        assert!(tat.z_parity.holds && tat.spin_flip.holds);
        assert!(!tat.x_rotation.holds);
        // the transverse field breaks the spin flip and the x rotations, while
        // conjugation by e^{i pi J_z} leaves both J_x^2 and J_z unchanged
        let tf = rep(HamiltonianKind::Tf);
        assert!(!tf.spin_flip.holds && !tf.x_rotation.holds);
        assert!(tf.z_parity.holds);
    }

    #[test]
    fn symmetries_on_a_subset() {
        let h = Hamiltonian::build(HamiltonianKind::Tat, 1.0, &[1, 3], 4).unwrap();
        let r = symmetry_report(&h);
        assert!(r.z_parity.holds && r.spin_flip.holds && !r.x_rotation.holds);
        let h = Hamiltonian::build(HamiltonianKind::Oat, 1.0, &[0, 2, 3], 4).unwrap();
        assert!(symmetry_report(&h).x_rotation.holds);
    }

    #[test]
    fn twisting_conserves_total_spin() {
        for n in 2..=5 {
            for k in [HamiltonianKind::Oat, HamiltonianKind::Tat, HamiltonianKind::Tf] {
                let h = Hamiltonian::on_register(k, 1.0, n).unwrap();
                assert!(total_spin_commutator(&h) < 1e-10, "{k} n={n}");
            }
        }
    }

    #[test]
    fn invalid_inputs() {
        assert!(matches!(Hamiltonian::build(HamiltonianKind::Oat, 1.0, &[], 3), Err(Error::Domain(_))));
        assert!(Hamiltonian::build(HamiltonianKind::Oat, 1.0, &[3], 3).is_err());
        assert!(Hamiltonian::build(HamiltonianKind::Oat, 1.0, &[1, 1], 3).is_err());
        assert!(matches!(
            Hamiltonian::on_register(HamiltonianKind::Oat, 1.0, 11),
            Err(Error::ResourceCap { .. })
        ));
    }

    #[test]
    fn kind_names_round_trip() {
        for k in HamiltonianKind::ALL {
            assert_eq!(k.name().parse::<HamiltonianKind>().unwrap(), k);
        }
        assert!("twist".parse::<HamiltonianKind>().is_err());
    }
}
