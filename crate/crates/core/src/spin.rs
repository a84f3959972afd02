//! Collective spin operators `J_a = 1/2 sum_i sigma_i^a` and the
//! Kitagawa-Ueda squeezing parameter.

use nalgebra::{Matrix2, Matrix3, SymmetricEigen, Vector3};

use crate::error::{Error, Result};
use crate::qcore::{c, CMatrix, DensityMatrix, PureState, C64};

/// Below this mean-spin length the perpendicular plane is undefined and the
/// variance is minimized over the whole sphere instead.
pub const DEGENERATE_MEAN_SPIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

/// `J_axis |v>` on an `n`-qubit register via bit operations.
pub fn apply_collective(axis: Axis, n_spins: usize, v: &[C64], out: &mut [C64]) {
    let dim = 1usize << n_spins;
    debug_assert!(v.len() == dim && out.len() == dim);
    out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
    for k in 0..n_spins {
        let mask = 1usize << (n_spins - 1 - k);
        for i in 0..dim {
            let up = i & mask == 0;
            out[i] += match axis {
                Axis::X => v[i ^ mask],
                Axis::Y => {
                    let f = v[i ^ mask];
                    if up {
                        C64::new(f.im, -f.re)
                    } else {
                        C64::new(-f.im, f.re)
                    }
                }
                Axis::Z => {
                    if up {
                        v[i]
                    } else {
                        -v[i]
                    }
                }
            };
        }
    }
    out.iter_mut().for_each(|z| *z *= 0.5);
}

/// Dense collective spin operators on an `n_spins` register.
#[derive(Debug, Clone)]
pub struct CollectiveSpinOps {
    n_spins: usize,
    jx: CMatrix,
    jy: CMatrix,
    jz: CMatrix,
}

pub fn collective_ops(n_spins: usize) -> Result<CollectiveSpinOps> {
    CollectiveSpinOps::new(n_spins)
}

impl CollectiveSpinOps {
    pub fn new(n_spins: usize) -> Result<Self> {
        if n_spins == 0 {
            return Err(Error::Domain("collective spin needs at least one spin".into()));
        }
        let dim = 1usize << n_spins;
        let mut jx = CMatrix::zeros(dim, dim);
        let mut jy = CMatrix::zeros(dim, dim);
        let mut jz = CMatrix::zeros(dim, dim);
        for k in 0..n_spins {
            let mask = 1usize << (n_spins - 1 - k);
            for col in 0..dim {
                let row = col ^ mask;
                let up_row = row & mask == 0;
                jx[(row, col)] += c(0.5, 0.0);
                jy[(row, col)] += if up_row { c(0.0, -0.5) } else { c(0.0, 0.5) };
                jz[(col, col)] += if col & mask == 0 { c(0.5, 0.0) } else { c(-0.5, 0.0) };
            }
        }
        Ok(Self { n_spins, jx, jy, jz })
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn dim(&self) -> usize {
        self.jx.nrows()
    }

    pub fn jx(&self) -> &CMatrix {
        &self.jx
    }

    pub fn jy(&self) -> &CMatrix {
        &self.jy
    }

    pub fn jz(&self) -> &CMatrix {
        &self.jz
    }

    pub fn component(&self, axis: Axis) -> &CMatrix {
        match axis {
            Axis::X => &self.jx,
            Axis::Y => &self.jy,
            Axis::Z => &self.jz,
        }
    }

    /// `n . J` for a real direction `n`.
    pub fn along(&self, n: [f64; 3]) -> CMatrix {
        &self.jx * c(n[0], 0.0) + &self.jy * c(n[1], 0.0) + &self.jz * c(n[2], 0.0)
    }

    /// Total angular momentum `J^2`.
    pub fn j_squared(&self) -> CMatrix {
        &self.jx * &self.jx + &self.jy * &self.jy + &self.jz * &self.jz
    }
}

/// First and symmetrized second moments of the collective spin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinMoments {
    pub n_spins: usize,
    /// `<J_a>`
    pub mean: [f64; 3],
    /// `<(J_a J_b + J_b J_a) / 2>`
    pub second: [[f64; 3]; 3],
}

impl SpinMoments {
    pub fn from_pure(state: &PureState) -> Self {
        let n = state.n_qubits();
        let psi = state.amplitudes().as_slice();
        let applied: Vec<Vec<C64>> = Axis::ALL
            .iter()
            .map(|&a| {
                let mut out = vec![C64::new(0.0, 0.0); psi.len()];
                apply_collective(a, n, psi, &mut out);
                out
            })
            .collect();
        let dot = |u: &[C64], v: &[C64]| -> f64 {
            u.iter().zip(v).map(|(x, y)| (x.conj() * y).re).sum()
        };
        let mut mean = [0.0; 3];
        let mut second = [[0.0; 3]; 3];
        for a in 0..3 {
            mean[a] = dot(psi, &applied[a]);
            for b in a..3 {
                second[a][b] = dot(&applied[a], &applied[b]);
                second[b][a] = second[a][b];
            }
        }
        Self { n_spins: n, mean, second }
    }

    pub fn from_density(rho: &DensityMatrix, ops: &CollectiveSpinOps) -> Result<Self> {
        if rho.dim() != ops.dim() {
            return Err(Error::DimensionMismatch { expected: ops.dim(), got: rho.dim() });
        }
        let n = ops.n_spins();
        let d = rho.dim();
        // B_a = J_a rho, column by column
        let applied: Vec<CMatrix> = Axis::ALL
            .iter()
            .map(|&a| {
                let mut out = CMatrix::zeros(d, d);
                let mut buf = vec![C64::new(0.0, 0.0); d];
                for j in 0..d {
                    apply_collective(a, n, rho.matrix().column(j).as_slice(), &mut buf);
                    out.column_mut(j).copy_from_slice(&buf);
                }
                out
            })
            .collect();
        let mut mean = [0.0; 3];
        let mut second = [[0.0; 3]; 3];
        for a in 0..3 {
            mean[a] = applied[a].trace().re;
            let ja = ops.component(Axis::ALL[a]);
            for b in 0..3 {
                // Re Tr(J_a J_b rho) = Re sum conj(J_a)_{ij} (J_b rho)_{ij}
                let v: f64 = ja.iter().zip(applied[b].iter()).map(|(x, y)| (x.conj() * y).re).sum();
                second[a][b] = v;
            }
        }
        for a in 0..3 {
            for b in a + 1..3 {
                let s = 0.5 * (second[a][b] + second[b][a]);
                second[a][b] = s;
                second[b][a] = s;
            }
        }
        Ok(Self { n_spins: n, mean, second })
    }

    pub fn covariance(&self) -> Matrix3<f64> {
        let m = Vector3::from(self.mean);
        Matrix3::from_fn(|a, b| self.second[a][b]) - m * m.transpose()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingResult {
    pub xi2: f64,
    pub mean_spin: [f64; 3],
    pub optimal_direction: [f64; 3],
    pub degenerate_mean_spin: bool,
}

/// Two unit vectors completing `n` to a right-handed orthonormal frame.
pub fn perpendicular_basis(n: Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let abs = n.abs();
    let seed = if abs.x <= abs.y && abs.x <= abs.z {
        Vector3::x()
    } else if abs.y <= abs.z {
        Vector3::y()
    } else {
        Vector3::z()
    };
    let n1 = n.cross(&seed).normalize();
    let n2 = n.cross(&n1);
    (n1, n2)
}

/// `xi^2 = 4 min Var(J_perp) / N`, minimized exactly over the plane
/// perpendicular to the mean spin.
pub fn squeezing_from_moments(m: &SpinMoments) -> SqueezingResult {
    let mean = Vector3::from(m.mean);
    let cov = m.covariance();
    let scale = 4.0 / m.n_spins as f64;
    let len = mean.norm();
    if len < DEGENERATE_MEAN_SPIN {
        let eig = SymmetricEigen::new(cov);
        let k = eig.eigenvalues.imin();
        let dir = eig.eigenvectors.column(k).into_owned();
        return SqueezingResult {
            xi2: (scale * eig.eigenvalues[k]).max(0.0),
            mean_spin: m.mean,
            optimal_direction: dir.into(),
            degenerate_mean_spin: true,
        };
    }
    let (n1, n2) = perpendicular_basis(mean / len);
    let gamma = Matrix2::new(
        n1.dot(&(cov * n1)),
        n1.dot(&(cov * n2)),
        n2.dot(&(cov * n1)),
        n2.dot(&(cov * n2)),
    );
    let (a, b, d) = (gamma[(0, 0)], 0.5 * (gamma[(0, 1)] + gamma[(1, 0)]), gamma[(1, 1)]);
    let lmin = 0.5 * (a + d) - (0.5 * (a - d)).hypot(b);
    let u = Vector3::new(b, lmin - a, 0.0);
    let w = Vector3::new(lmin - d, b, 0.0);
    let (u1, u2) = if u.norm() >= w.norm() { (u.x, u.y) } else { (w.x, w.y) };
    let dir = if u1.hypot(u2) > 0.0 {
        (n1 * u1 + n2 * u2).normalize()
    } else {
        n1
    };
    SqueezingResult {
        xi2: (scale * lmin).max(0.0),
        mean_spin: m.mean,
        optimal_direction: dir.into(),
        degenerate_mean_spin: false,
    }
}

pub fn squeezing_parameter(rho: &DensityMatrix, ops: &CollectiveSpinOps) -> Result<SqueezingResult> {
    Ok(squeezing_from_moments(&SpinMoments::from_density(rho, ops)?))
}

pub fn squeezing_parameter_pure(state: &PureState) -> SqueezingResult {
    squeezing_from_moments(&SpinMoments::from_pure(state))
}

/// Variance of `n . J` in `rho`, from the dense operators.
pub fn variance_along(rho: &DensityMatrix, ops: &CollectiveSpinOps, n: [f64; 3]) -> Result<f64> {
    let jn = ops.along(n);
    let mean = crate::qcore::expectation(rho, &jn)?;
    let sq = crate::qcore::expectation(rho, &(&jn * &jn))?;
    Ok(sq - mean * mean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{dm_from_pure, expectation, hermiticity_error, max_abs_diff, tensor_product};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(n: usize, rng: &mut ChaCha8Rng) -> PureState {
        let amps = (0..1 << n)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        PureState::normalized(n, amps).unwrap()
    }

    fn ghz_evolved(phi: f64) -> PureState {
        // cos(phi)|1111> - i sin(phi)|0000>
        let mut v = vec![c(0.0, 0.0); 16];
        v[15] = c(phi.cos(), 0.0);
        v[0] = c(0.0, -phi.sin());
        PureState::new(4, v).unwrap()
    }

    #[test]
    fn single_spin_is_half_pauli() {
        let ops = collective_ops(1).unwrap();
        assert_eq!(ops.jx()[(0, 1)], c(0.5, 0.0));
        assert_eq!(ops.jy()[(0, 1)], c(0.0, -0.5));
        assert_eq!(ops.jy()[(1, 0)], c(0.0, 0.5));
        assert_eq!(ops.jz()[(0, 0)], c(0.5, 0.0));
        assert_eq!(ops.jz()[(1, 1)], c(-0.5, 0.0));
        assert!(matches!(collective_ops(0), Err(Error::Domain(_))));
    }

    #[test]
    fn commutation_relations() {
        for n in 1..=8 {
            let ops = collective_ops(n).unwrap();
            let comm = ops.jx() * ops.jy() - ops.jy() * ops.jx();
            assert!(max_abs_diff(&comm, &(ops.jz() * c(0.0, 1.0))) < 1e-10, "n = {n}");
            for a in Axis::ALL {
                assert_eq!(hermiticity_error(ops.component(a)), 0.0);
            }
            let zs: Vec<f64> = (0..ops.dim()).map(|i| ops.jz()[(i, i)].re).collect();
            let hi = zs.iter().cloned().fold(f64::MIN, f64::max);
            let lo = zs.iter().cloned().fold(f64::MAX, f64::min);
            assert_eq!((hi, lo), (n as f64 / 2.0, -(n as f64) / 2.0));
        }
    }

    #[test]
    fn sparse_apply_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=5 {
            let ops = collective_ops(n).unwrap();
            let s = random_state(n, &mut rng);
            for a in Axis::ALL {
                let mut out = vec![c(0.0, 0.0); s.dim()];
                apply_collective(a, n, s.amplitudes().as_slice(), &mut out);
                let dense = ops.component(a) * s.amplitudes();
                let diff = out.iter().zip(dense.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
                assert!(diff < 1e-14);
            }
        }
    }

    #[test]
    fn all_down_mean_spin() {
        let ops = collective_ops(4).unwrap();
        let rho = dm_from_pure(&PureState::all_down(4));
        assert!((expectation(&rho, ops.jz()).unwrap() + 2.0).abs() < 1e-15);
    }

    #[test]
    fn coherent_states_are_not_squeezed() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=6 {
            let r = squeezing_parameter_pure(&PureState::all_down(n));
            assert!((r.xi2 - 1.0).abs() < 1e-12);
            assert!(!r.degenerate_mean_spin);
            let single = random_state(1, &mut rng);
            let mut s = single.clone();
            for _ in 1..n {
                s = tensor_product(&s, &single);
            }
            assert!((squeezing_parameter_pure(&s).xi2 - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn ghz_evolved_state_has_unit_xi2() {
        let ops = collective_ops(4).unwrap();
        for k in 0..=20 {
            let phi = k as f64 * std::f64::consts::PI / 20.0;
            let s = ghz_evolved(phi);
            let r = squeezing_parameter(&dm_from_pure(&s), &ops).unwrap();
            assert!((r.xi2 - 1.0).abs() < 1e-10, "phi = {phi}: {}", r.xi2);
        }
        let r = squeezing_parameter_pure(&ghz_evolved(std::f64::consts::FRAC_PI_4));
        assert!(r.degenerate_mean_spin);
        assert!((r.xi2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_and_density_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=5 {
            let ops = collective_ops(n).unwrap();
            for _ in 0..10 {
                let s = random_state(n, &mut rng);
                let a = SpinMoments::from_pure(&s);
                let b = SpinMoments::from_density(&dm_from_pure(&s), &ops).unwrap();
                for i in 0..3 {
                    assert!((a.mean[i] - b.mean[i]).abs() < 1e-12);
                    for j in 0..3 {
                        assert!((a.second[i][j] - b.second[i][j]).abs() < 1e-12);
                    }
                }
            }
        }
    }

    /// Brute-force minimum of `Var(J_perp)` over perpendicular angles: a
    /// 3600-point scan over `[0, pi)` followed by a 3600-point zoom.
    fn brute_force_xi2(rho: &DensityMatrix, ops: &CollectiveSpinOps) -> f64 {
        let mean = Vector3::new(
            expectation(rho, ops.jx()).unwrap(),
            expectation(rho, ops.jy()).unwrap(),
            expectation(rho, ops.jz()).unwrap(),
        );
        let j = [ops.jx(), ops.jy(), ops.jz()];
        let cov = Matrix3::from_fn(|a, b| {
            let sym = (j[a] * j[b] + j[b] * j[a]) * c(0.5, 0.0);
            expectation(rho, &sym).unwrap() - mean[a] * mean[b]
        });
        let (n1, n2) = perpendicular_basis(mean.normalize());
        let var = |th: f64| {
            let d = n1 * th.cos() + n2 * th.sin();
            d.dot(&(cov * d))
        };
        let step = std::f64::consts::PI / 3600.0;
        let (mut best, mut best_th) = (f64::MAX, 0.0);
        for k in 0..3600 {
            let th = k as f64 * step;
            let v = var(th);
            if v < best {
                best = v;
                best_th = th;
            }
        }
        let lo = best_th - step;
        for k in 0..=3600 {
            best = best.min(var(lo + 2.0 * step * k as f64 / 3600.0));
        }
        4.0 * best / ops.n_spins() as f64
    }

    #[test]
    fn closed_form_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for i in 0..50 {
            let n = 2 + i % 3;
            let ops = collective_ops(n).unwrap();
            let rho = dm_from_pure(&random_state(n, &mut rng));
            let r = squeezing_parameter(&rho, &ops).unwrap();
            assert!(!r.degenerate_mean_spin);
            let oracle = brute_force_xi2(&rho, &ops);
            assert!((r.xi2 - oracle).abs() < 1e-8, "{} vs {}", r.xi2, oracle);
            let m = Vector3::from(r.mean_spin).normalize();
            assert!(m.dot(&Vector3::from(r.optimal_direction)).abs() < 1e-8);
            let v = variance_along(&rho, &ops, r.optimal_direction).unwrap();
            assert!((4.0 * v / n as f64 - r.xi2).abs() < 1e-10);
        }
    }

    #[test]
    fn invariant_under_global_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 2..=4 {
            let ops = collective_ops(n).unwrap();
            for _ in 0..5 {
                let s = random_state(n, &mut rng);
                let axis = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)).normalize();
                let angle = rng.random_range(0.0..6.0);
                let rotated = crate::qcore::evolve(&s, &ops.along(axis.into()), angle).unwrap();
                let a = squeezing_parameter_pure(&s).xi2;
                let b = squeezing_parameter_pure(&rotated).xi2;
                assert!((a - b).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn perpendicular_basis_is_orthonormal() {
        for n in [Vector3::x(), Vector3::y(), Vector3::z(), Vector3::new(1.0, -2.0, 0.5).normalize()] {
            let (a, b) = perpendicular_basis(n);
            assert!(a.dot(&n).abs() < 1e-15 && b.dot(&n).abs() < 1e-15 && a.dot(&b).abs() < 1e-15);
            assert!((a.norm() - 1.0).abs() < 1e-15 && (b.norm() - 1.0).abs() < 1e-15);
        }
    }

    proptest! {
        #[test]
        fn xi2_is_nonnegative(seed in any::<u64>(), n in 1usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = squeezing_parameter_pure(&random_state(n, &mut rng));
            prop_assert!(r.xi2 >= 0.0 && r.xi2.is_finite());
        }
    }
}
