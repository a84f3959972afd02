//! Closed-form bounds and the analytically solvable GHZ protocol, used as
//! oracles and for exact calibration inversion.

use crate::error::{Error, Result};
use crate::measures::{max_negativity_of, negativity_2pn_of};
use crate::qcore::{c, CMatrix, PureState, Spectrum, C64};

fn check_unit(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {x} is outside [0, 1]")))
    }
}

/// Largest two-qubit concurrence reachable inside `A` for a `2 + 1` pure
/// state with A|B concurrence `c_ab`: `(1 + sqrt(1 - c_ab^2)) / 2`.
pub fn cmax_boundary(c_ab: f64) -> Result<f64> {
    check_unit("c_ab", c_ab)?;
    Ok(0.5 * (1.0 + (1.0 - c_ab * c_ab).sqrt()))
}

/// Largest normalized negativity reachable inside `A` for a `2 + 1` pure
/// state with A|B negativity `n_ab`.
pub fn nmax_boundary_2p1(n_ab: f64) -> Result<f64> {
    check_unit("n_ab", n_ab)?;
    let n2 = n_ab * n_ab;
    Ok(0.5 * (-1.0 + (4.0 - 2.0 * n2).sqrt() + (1.0 - n2).sqrt()))
}

/// The six candidate negative eigenvalues `-sqrt(l_i l_j)`, `i < j`, of the
/// partial transpose of a `2 + N` pure state whose two-qubit side has this
/// spectrum, in the order (12, 13, 14, 23, 24, 34).
#[allow(non_snake_case)]
pub fn negative_eigs_2pN(spec: &Spectrum) -> Result<[f64; 6]> {
    let l = spec.four()?;
    let mut out = [0.0; 6];
    let mut k = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            let p = l[i] * l[j];
            out[k] = if p > 0.0 { -p.sqrt() } else { 0.0 };
            k += 1;
        }
    }
    Ok(out)
}

/// `sum_i sqrt(l_i) |i>_A |i>_B` with `A` the two leading qubits and `B` the
/// remaining `n_b >= 2` qubits.
pub fn two_plus_n_state(spec: &Spectrum, n_b: usize) -> Result<PureState> {
    let l = spec.four()?;
    if n_b < 2 {
        return Err(Error::Domain(format!("B needs at least two qubits, got {n_b}")));
    }
    let n = 2 + n_b;
    let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
    for (i, li) in l.iter().enumerate() {
        amps[(i << n_b) | i] = c(li.sqrt(), 0.0);
    }
    PureState::normalized(n, amps)
}

/// A|B negativity above which no global unitary on `A` can entangle `A`'s
/// two qubits: `1/3 + sqrt(1/3)`.
pub fn threshold_negativity() -> f64 {
    1.0 / 3.0 + (1.0f64 / 3.0).sqrt()
}

/// The spectrum `(1/2, 1/6, 1/6, 1/6)` attaining the threshold negativity.
pub fn threshold_state() -> Spectrum {
    let s = 1.0 / 6.0;
    Spectrum::new(vec![0.5, s, s, s]).expect("valid spectrum")
}

/// Outcome of scanning the ordered simplex for spectra that contradict the
/// negativity threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdScan {
    pub points: usize,
    /// Spectra with negativity above the threshold but nonzero `max_negativity`.
    pub above_threshold_violations: usize,
    /// Spectra with `l4 >= 1/6` but nonzero `max_negativity`.
    pub lambda4_violations: usize,
    pub largest_violation: f64,
}

impl ThresholdScan {
    pub fn holds(&self) -> bool {
        self.above_threshold_violations == 0 && self.lambda4_violations == 0
    }
}

/// Scans every ordered spectrum `l1 >= l2 >= l3 >= l4 >= 0` whose entries are
/// multiples of `1 / steps`.
pub fn threshold_scan(steps: usize) -> ThresholdScan {
    let th = threshold_negativity();
    let h = steps as f64;
    let mut out = ThresholdScan {
        points: 0,
        above_threshold_violations: 0,
        lambda4_violations: 0,
        largest_violation: 0.0,
    };
    for k4 in 0..=steps / 4 {
        for k3 in k4..=(steps - k4) / 3 {
            for k2 in k3..=(steps - k4 - k3) / 2 {
                let k1 = steps - k2 - k3 - k4;
                let l = [k1 as f64 / h, k2 as f64 / h, k3 as f64 / h, k4 as f64 / h];
                out.points += 1;
                let nmax = max_negativity_of(l);
                if nmax == 0.0 {
                    continue;
                }
                let mut bad = false;
                if negativity_2pn_of(l) > th {
                    out.above_threshold_violations += 1;
                    bad = true;
                }
                if 6 * k4 >= steps {
                    out.lambda4_violations += 1;
                    bad = true;
                }
                if bad {
                    out.largest_violation = out.largest_violation.max(nmax);
                }
            }
        }
    }
    out
}

/// Closed-form quantities of the four-qubit GHZ protocol at
/// `phi = Omega t` and `phi' = Omega' t'`.
#[derive(Debug, Clone, PartialEq)]
pub struct GhzAnalytics {
    /// `rho_AB` restricted to `span{|0000>, |1111>}`.
    pub rho_ab_2level: CMatrix,
    pub xi2_ab: f64,
    pub s_l_ab: f64,
    pub xi2_a: f64,
    pub min_xi2_a: f64,
    pub s_l_from_min_xi2: f64,
}

pub fn ghz_protocol_analytics(phi: f64, phi_prime: f64) -> GhzAnalytics {
    let (s2, c2) = (2.0 * phi).sin_cos();
    let rho = CMatrix::from_row_slice(
        2,
        2,
        &[c(0.5 * (1.0 + c2), 0.0), c(0.0, 0.5 * s2), c(0.0, -0.5 * s2), c(0.5 * (1.0 - c2), 0.0)],
    );
    let min_xi2_a = 1.0 - c2.abs();
    GhzAnalytics {
        rho_ab_2level: rho,
        xi2_ab: 1.0,
        s_l_ab: 2.0 / 3.0 * (1.0 - c2 * c2),
        xi2_a: 1.0 - (c2 * (2.0 * phi_prime).sin()).abs(),
        min_xi2_a,
        s_l_from_min_xi2: ghz_linear_entropy(min_xi2_a),
    }
}

/// `S_L,AB = (2/3) (1 - (1 - x)^2)` as a function of `x = min xi_A^2`.
pub fn ghz_linear_entropy(min_xi2: f64) -> f64 {
    let u = 1.0 - min_xi2;
    2.0 / 3.0 * (1.0 - u * u)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    CmaxOfCab,
    NmaxOfNab2p1,
    GhzLinearEntropy,
}

/// A monotone bound function together with its domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCurve {
    pub kind: BoundaryKind,
    pub domain: (f64, f64),
}

impl BoundaryCurve {
    pub fn new(kind: BoundaryKind) -> Self {
        Self { kind, domain: (0.0, 1.0) }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(self.domain.0..=self.domain.1).contains(&x) {
            return Err(Error::Domain(format!(
                "{x} is outside [{}, {}]",
                self.domain.0, self.domain.1
            )));
        }
        match self.kind {
            BoundaryKind::CmaxOfCab => cmax_boundary(x),
            BoundaryKind::NmaxOfNab2p1 => nmax_boundary_2p1(x),
            BoundaryKind::GhzLinearEntropy => Ok(ghz_linear_entropy(x)),
        }
    }

    /// `n >= 2` evenly spaced points over the domain.
    pub fn sample(&self, n: usize) -> Vec<(f64, f64)> {
        let (lo, hi) = self.domain;
        (0..n)
            .map(|k| {
                let x = if k + 1 == n { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 };
                (x, self.eval(x).expect("inside domain"))
            })
            .collect()
    }
}

/// Boundary drawn against the `2 + N` negativity: the `2 + 1` bound with its
/// argument rescaled by three, over `n_ab in [0, 1/3]`.
pub fn nmax_boundary_rescaled(n_ab: f64) -> Result<f64> {
    if !(0.0..=1.0 / 3.0).contains(&n_ab) {
        return Err(Error::Domain(format!("n_ab = {n_ab} is outside [0, 1/3]")));
    }
    nmax_boundary_2p1((3.0 * n_ab).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{max_negativity, negativity_2pN_from_spectrum, negativity_raw};
    use crate::qcore::{dm_from_pure, hermitian_eigen, partial_transpose, Partition, Side};
    use proptest::prelude::*;

    fn spec(v: &[f64]) -> Spectrum {
        Spectrum::new(v.to_vec()).unwrap()
    }

    #[test]
    fn cmax_cases() {
        assert_eq!(cmax_boundary(0.0).unwrap(), 1.0);
        assert_eq!(cmax_boundary(1.0).unwrap(), 0.5);
        assert!(cmax_boundary(1.5).is_err() && cmax_boundary(-0.1).is_err() && cmax_boundary(f64::NAN).is_err());
        for k in 0..100 {
            let cab = k as f64 / 99.0;
            let l1 = cmax_boundary(cab).unwrap();
            assert!((4.0 * l1 - 4.0 * l1 * l1 - cab * cab).abs() < 1e-12);
        }
    }

    #[test]
    fn nmax_cases() {
        assert_eq!(nmax_boundary_2p1(0.0).unwrap(), 1.0);
        let end = nmax_boundary_2p1(1.0).unwrap();
        assert!((end - (2f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
        assert!((end - 0.20711).abs() < 1e-5);
        assert!((max_negativity(&spec(&[0.5, 0.5, 0.0, 0.0])).unwrap() - end).abs() < 1e-15);
        assert!(nmax_boundary_2p1(1.01).is_err());
    }

    #[test]
    fn nmax_matches_rank_two_spectra() {
        for k in 0..=200 {
            let l1 = 0.5 + 0.5 * k as f64 / 200.0;
            let s = spec(&[l1, 1.0 - l1, 0.0, 0.0]);
            let n_ab = 2.0 * (l1 * (1.0 - l1)).sqrt();
            let want = nmax_boundary_2p1(n_ab.min(1.0)).unwrap();
            assert!((max_negativity(&s).unwrap() - want).abs() < 1e-10, "l1 = {l1}");
        }
    }

    #[test]
    fn boundaries_are_monotone() {
        let cm = BoundaryCurve::new(BoundaryKind::CmaxOfCab).sample(1001);
        let nm = BoundaryCurve::new(BoundaryKind::NmaxOfNab2p1).sample(1001);
        let gl = BoundaryCurve::new(BoundaryKind::GhzLinearEntropy).sample(1001);
        for w in cm.windows(2).chain(nm.windows(2)) {
            assert!(w[1].1 < w[0].1);
        }
        for w in gl.windows(2) {
            assert!(w[1].1 > w[0].1);
        }
        for p in cm.iter().chain(&nm).chain(&gl) {
            assert!(p.1.is_finite() && (0.0..=1.0).contains(&p.1));
        }
        assert!(BoundaryCurve::new(BoundaryKind::CmaxOfCab).eval(2.0).is_err());
    }

    #[test]
    fn negative_eigs_cases() {
        assert_eq!(negative_eigs_2pN(&spec(&[1.0, 0.0, 0.0, 0.0])).unwrap(), [0.0; 6]);
        let half = negative_eigs_2pN(&spec(&[0.5, 0.5, 0.0, 0.0])).unwrap();
        assert_eq!(half[0], -0.5);
        assert!(half[1..].iter().all(|&v| v == 0.0));
        let flat = negative_eigs_2pN(&spec(&[0.25; 4])).unwrap();
        assert!(flat.iter().all(|&v| v == -0.25));
        assert_eq!(flat.iter().sum::<f64>(), -1.5);
    }

    #[test]
    fn negative_eigs_match_brute_force() {
        let spectra = [
            vec![0.5, 0.5, 0.0, 0.0],
            vec![0.4, 0.3, 0.2, 0.1],
            vec![0.7, 0.1, 0.1, 0.1],
            vec![0.25; 4],
            vec![0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0],
        ];
        for v in spectra {
            let s = spec(&v);
            let mut want: Vec<f64> = negative_eigs_2pN(&s).unwrap().into_iter().filter(|&x| x < 0.0).collect();
            want.sort_by(f64::total_cmp);
            for n_b in 2..=4 {
                let psi = two_plus_n_state(&s, n_b).unwrap();
                let p = Partition::leading(2 + n_b, 2).unwrap();
                let rho = dm_from_pure(&psi);
                let pt = partial_transpose(&rho, &p, Side::A).unwrap();
                let mut got: Vec<f64> = hermitian_eigen(&pt).unwrap().values.into_iter().filter(|&x| x < -1e-12).collect();
                got.sort_by(f64::total_cmp);
                assert_eq!(got.len(), want.len(), "{v:?}, n_b = {n_b}");
                for (g, w) in got.iter().zip(&want) {
                    assert!((g - w).abs() < 1e-9);
                }
                let norm = negativity_raw(&rho, &p).unwrap() / 1.5;
                assert!((norm - negativity_2pN_from_spectrum(&s).unwrap()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn threshold_values() {
        assert!((threshold_negativity() - 0.9106836).abs() < 1e-7);
        let s = threshold_state();
        assert_eq!(max_negativity(&s).unwrap(), 0.0);
        assert!((negativity_2pN_from_spectrum(&s).unwrap() - threshold_negativity()).abs() < 1e-15);
    }

    #[test]
    fn threshold_scan_coarse() {
        let r = threshold_scan(200);
        assert!(r.points > 10_000);
        assert!(r.holds(), "{r:?}");
    }

    #[test]
    fn ghz_analytics_cases() {
        let a = ghz_protocol_analytics(0.0, 0.3);
        assert_eq!((a.s_l_ab, a.min_xi2_a, a.xi2_ab), (0.0, 0.0, 1.0));
        let b = ghz_protocol_analytics(std::f64::consts::FRAC_PI_4, 0.3);
        assert!((b.s_l_ab - 2.0 / 3.0).abs() < 1e-15);
        assert!((b.min_xi2_a - 1.0).abs() < 1e-15);
        let tr = a.rho_ab_2level.trace();
        assert!((tr.re - 1.0).abs() < 1e-15 && tr.im == 0.0);
        for k in 0..1000 {
            let phi = std::f64::consts::PI * k as f64 / 999.0;
            let g = ghz_protocol_analytics(phi, 0.0);
            assert!((g.s_l_from_min_xi2 - g.s_l_ab).abs() < 1e-12);
        }
    }

    #[test]
    fn rescaled_boundary() {
        assert_eq!(nmax_boundary_rescaled(0.0).unwrap(), 1.0);
        assert!((nmax_boundary_rescaled(1.0 / 3.0).unwrap() - nmax_boundary_2p1(1.0).unwrap()).abs() < 1e-15);
        assert!(nmax_boundary_rescaled(0.4).is_err());
    }

    proptest! {
        #[test]
        fn min_over_phi_prime(phi in 0.0..3.2f64, pp in 0.0..3.2f64) {
            let g = ghz_protocol_analytics(phi, pp);
            prop_assert!(g.xi2_a >= g.min_xi2_a - 1e-15);
            prop_assert!((0.0..=1.0).contains(&g.xi2_a));
        }
    }
}
