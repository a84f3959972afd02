//! Random states and spectra, and the point clouds comparing A|B
//! entanglement with the entanglement reachable inside `A`.
//!
//! Every sample draws from its own generator seeded by
//! [`derive_seed`]`(seed, index)`, so datasets are identical for any thread
//! count or schedule.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;

use crate::analytic::{cmax_boundary, nmax_boundary_rescaled, threshold_negativity};
use crate::error::{Error, Result};
use crate::measures::{concurrence, max_negativity, negativity_2pN_from_spectrum};
use crate::qcore::{c, Partition, PureState, Side, Spectrum};

/// Slack allowed above an analytic bound before a point counts as a violation.
pub const BOUND_TOL: f64 = 1e-9;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `index`-th sample of a dataset generated from `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ index)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Haar-random pure state: a normalized vector of i.i.d. standard complex
/// Gaussian amplitudes.
pub fn haar_random_pure(n_qubits: usize, seed: u64) -> PureState {
    let mut r = rng(seed);
    loop {
        let amps = (0..1usize << n_qubits)
            .map(|_| c(r.sample(StandardNormal), r.sample(StandardNormal)))
            .collect();
        if let Ok(s) = PureState::normalized(n_qubits, amps) {
            return s;
        }
    }
}

/// Uniform point on the simplex of the `4 - zeros` nonzero entries, padded
/// with `zeros` exact zeros and sorted descending.
pub fn random_spectrum(seed: u64, zeros: usize) -> Result<Spectrum> {
    if zeros > 2 {
        return Err(Error::Domain(format!("zeros must be 0, 1 or 2, got {zeros}")));
    }
    let mut r = rng(seed);
    let mut v: Vec<f64> = (0..4 - zeros).map(|_| r.sample::<f64, _>(Exp1)).collect();
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
    v.resize(4, 0.0);
    Spectrum::from_unsorted(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SampleClass {
    /// At most two nonzero eigenvalues.
    TwoNonzero,
    ThreeNonzero,
    FourNonzero,
}

impl SampleClass {
    pub fn of(spec: &Spectrum) -> Self {
        match spec.rank() {
            0..=2 => Self::TwoNonzero,
            3 => Self::ThreeNonzero,
            _ => Self::FourNonzero,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::TwoNonzero => "two_nonzero",
            Self::ThreeNonzero => "three_nonzero",
            Self::FourNonzero => "four_nonzero",
        }
    }
}

/// Boundary spectra appended to every negativity dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Marker {
    PureA,
    TwoEqual,
    ThreeEqual,
    MaximallyMixed,
}

impl Marker {
    pub const ALL: [Marker; 4] = [Self::PureA, Self::TwoEqual, Self::ThreeEqual, Self::MaximallyMixed];

    pub fn spectrum(self) -> Spectrum {
        let v = match self {
            Self::PureA => vec![1.0, 0.0, 0.0, 0.0],
            Self::TwoEqual => vec![0.5, 0.5, 0.0, 0.0],
            Self::ThreeEqual => vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0],
            Self::MaximallyMixed => vec![0.25; 4],
        };
        Spectrum::new(v).expect("valid marker spectrum")
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::PureA => "pure_a",
            Self::TwoEqual => "two_equal",
            Self::ThreeEqual => "three_equal",
            Self::MaximallyMixed => "maximally_mixed",
        }
    }

    /// `(N_AB, N^max)` of the marker spectrum.
    pub fn expected(self) -> (f64, f64) {
        match self {
            Self::PureA => (0.0, 1.0),
            Self::TwoEqual => (1.0 / 3.0, (std::f64::consts::SQRT_2 - 1.0) / 2.0),
            Self::ThreeEqual => (2.0 / 3.0, 0.0),
            Self::MaximallyMixed => (1.0, 0.0),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SampleRecord {
    /// Spectrum of the two-qubit subsystem `A`.
    pub spectrum: Spectrum,
    /// The sampled three-qubit state, for concurrence datasets.
    pub state: Option<PureState>,
    /// A|B entanglement.
    pub x: f64,
    /// Entanglement inside `A` (actual concurrence, or maximal negativity).
    pub y: f64,
    /// Analytic upper bound on `y` at this `x`, where one applies.
    pub bound: Option<f64>,
    pub class: SampleClass,
    pub marker: Option<Marker>,
}

impl SampleRecord {
    pub fn violates_bound(&self) -> bool {
        self.bound.is_some_and(|b| self.y > b + BOUND_TOL)
    }
}

/// Concurrence sample for a `2 + 1` pure state: `x = 2 sqrt(l1 l2)` from the
/// two largest eigenvalues of `rho_A`, `y` the concurrence of `rho_A`.
pub fn concurrence_record(state: PureState) -> Result<SampleRecord> {
    let p = Partition::leading(3, 2)?;
    let rho_a = state.reduced(&p, Side::A)?;
    let spectrum = rho_a.spectrum()?;
    let l = spectrum.values();
    let x = (2.0 * (l[0] * l[1]).sqrt()).min(1.0);
    let y = concurrence(&rho_a)?;
    Ok(SampleRecord {
        class: SampleClass::of(&spectrum),
        spectrum,
        state: Some(state),
        x,
        y,
        bound: Some(cmax_boundary(x)?),
        marker: None,
    })
}

pub fn fig2_dataset(n_samples: usize, seed: u64) -> Result<Vec<SampleRecord>> {
    (0..n_samples)
        .into_par_iter()
        .map(|i| concurrence_record(haar_random_pure(3, derive_seed(seed, i as u64))))
        .collect()
}

/// Negativity sample for a `2 + N` pure state with two-qubit spectrum `spectrum`.
pub fn negativity_record(spectrum: Spectrum, marker: Option<Marker>) -> Result<SampleRecord> {
    let x = negativity_2pN_from_spectrum(&spectrum)?;
    let y = max_negativity(&spectrum)?;
    let class = SampleClass::of(&spectrum);
    let bound = match class {
        SampleClass::TwoNonzero => Some(nmax_boundary_rescaled(x.min(1.0 / 3.0))?),
        _ => None,
    };
    Ok(SampleRecord { spectrum, state: None, x, y, bound, class, marker })
}

/// `n_samples` random spectra, sample `i` forcing `i % 3` zero entries,
/// followed by the four [`Marker`] spectra.
pub fn fig3_dataset(n_samples: usize, seed: u64) -> Result<Vec<SampleRecord>> {
    let mut out: Vec<SampleRecord> = (0..n_samples)
        .into_par_iter()
        .map(|i| negativity_record(random_spectrum(derive_seed(seed, i as u64), i % 3)?, None))
        .collect::<Result<_>>()?;
    for m in Marker::ALL {
        out.push(negativity_record(m.spectrum(), Some(m))?);
    }
    Ok(out)
}

/// Counts of negativity records breaking the expected region structure.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RegionCheck {
    /// `two_nonzero` records further than [`BOUND_TOL`] from the rescaled curve.
    pub off_curve: usize,
    /// Records beyond the threshold negativity with `N^max > 1e-12`.
    pub above_threshold: usize,
    /// Marker records not at their expected point.
    pub marker_mismatch: usize,
}

impl RegionCheck {
    pub fn holds(&self) -> bool {
        *self == Self::default()
    }
}

pub fn region_check(records: &[SampleRecord]) -> RegionCheck {
    let threshold = threshold_negativity();
    let mut out = RegionCheck::default();
    for r in records {
        if let (SampleClass::TwoNonzero, Some(b)) = (r.class, r.bound) {
            if (r.y - b).abs() > BOUND_TOL {
                out.off_curve += 1;
            }
        }
        if r.x > threshold + BOUND_TOL && r.y > 1e-12 {
            out.above_threshold += 1;
        }
        if let Some(m) = r.marker {
            let (x, y) = m.expected();
            if (r.x - x).abs() > 1e-12 || (r.y - y).abs() > 1e-12 {
                out.marker_mismatch += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::threshold_negativity;
    use crate::measures::max_concurrence;
    use crate::qcore::{dm_from_pure, expectation, CMatrix};
    use proptest::prelude::*;

    #[test]
    fn haar_states_are_normalized_and_deterministic() {
        for s in 0..200 {
            let a = haar_random_pure(3, s);
            assert!((a.norm() - 1.0).abs() < 1e-12);
            let b = haar_random_pure(3, s);
            assert_eq!(a.amplitudes(), b.amplitudes());
        }
        assert_ne!(haar_random_pure(2, 1).amplitudes(), haar_random_pure(2, 2).amplitudes());
    }

    #[test]
    fn haar_single_qubit_has_no_preferred_axis() {
        let mut sz = 0.0;
        let mut sx = 0.0;
        let z = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        let x = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let n = 10_000;
        for i in 0..n {
            let rho = dm_from_pure(&haar_random_pure(1, derive_seed(7, i)));
            sz += expectation(&rho, &z).unwrap();
            sx += expectation(&rho, &x).unwrap();
        }
        assert!((sz / n as f64).abs() < 0.03);
        assert!((sx / n as f64).abs() < 0.03);
    }

    #[test]
    fn haar_moments_are_basis_independent() {
        // E|<e|psi>|^4 = 2 / (d (d + 1)) for every fixed unit vector e
        let n = 20_000;
        let d = 4.0;
        let h = 0.5f64.sqrt();
        let (mut basis, mut rotated) = (0.0, 0.0);
        for i in 0..n {
            let a = haar_random_pure(2, derive_seed(11, i));
            let v = a.amplitudes();
            basis += v[0].norm_sqr().powi(2);
            rotated += ((v[0] + v[3]) * h).norm_sqr().powi(2);
        }
        let want = 2.0 / (d * (d + 1.0));
        assert!((basis / n as f64 - want).abs() < 0.01);
        assert!((rotated / n as f64 - want).abs() < 0.01);
    }

    #[test]
    fn random_spectrum_shapes() {
        for s in 0..100 {
            let two = random_spectrum(s, 2).unwrap();
            let v = two.values();
            assert!(v[2] == 0.0 && v[3] == 0.0 && (v[0] + v[1] - 1.0).abs() < 1e-12);
            for z in 0..3 {
                let sp = random_spectrum(s, z).unwrap();
                assert!((sp.values().iter().sum::<f64>() - 1.0).abs() < 1e-12);
                assert!(sp.values().windows(2).all(|w| w[0] >= w[1]));
            }
        }
        assert!(random_spectrum(0, 3).is_err());
    }

    #[test]
    fn random_spectrum_order_statistics() {
        let n = 100_000;
        let mut mean = [0.0; 4];
        for i in 0..n {
            let s = random_spectrum(derive_seed(3, i), 0).unwrap();
            for (m, v) in mean.iter_mut().zip(s.values()) {
                *m += v / n as f64;
            }
        }
        let want = [25.0 / 48.0, 13.0 / 48.0, 7.0 / 48.0, 3.0 / 48.0];
        for (m, w) in mean.iter().zip(want) {
            assert!((m - w).abs() < 0.01, "{mean:?}");
        }
    }

    #[test]
    fn fig2_respects_bound() {
        let data = fig2_dataset(3000, 42).unwrap();
        assert_eq!(data.len(), 3000);
        assert!(data.iter().all(|r| !r.violates_bound()));
        for r in data.iter().take(200) {
            // the maximal concurrence of rho_A's spectrum sits on the bound;
            // sqrt(l2 l4) turns round-off in the vanishing l4 into ~1e-8
            let cm = max_concurrence(&r.spectrum).unwrap();
            assert!((cm - r.bound.unwrap()).abs() < 1e-7);
        }
    }

    #[test]
    fn fig2_ghz_and_product_points() {
        let h = 0.5f64.sqrt();
        let mut v = vec![c(0.0, 0.0); 8];
        v[0] = c(h, 0.0);
        v[7] = c(h, 0.0);
        let ghz = concurrence_record(PureState::new(3, v).unwrap()).unwrap();
        assert!((ghz.x - 1.0).abs() < 1e-12);
        assert!((ghz.bound.unwrap() - 0.5).abs() < 1e-12);
        assert!((max_concurrence(&ghz.spectrum).unwrap() - 0.5).abs() < 1e-12);
        assert!(ghz.y < 1e-12);
        let prod = concurrence_record(PureState::basis(3, 5).unwrap()).unwrap();
        assert!(prod.x < 1e-12 && prod.y < 1e-12);
        assert!((prod.bound.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fig3_regions() {
        let data = fig3_dataset(30_000, 5).unwrap();
        assert_eq!(data.len(), 30_004);
        let th = threshold_negativity();
        for r in &data {
            assert_eq!(r.class, SampleClass::of(&r.spectrum));
            if r.class == SampleClass::TwoNonzero {
                assert!((r.y - r.bound.unwrap()).abs() < 1e-9, "{r:?}");
            }
            if r.x > th {
                assert!(r.y <= 1e-12);
            }
        }
        let markers: Vec<_> = data.iter().filter_map(|r| r.marker.map(|m| (m, r.x, r.y))).collect();
        assert_eq!(markers.len(), 4);
        let mixed = markers.iter().find(|m| m.0 == Marker::MaximallyMixed).unwrap();
        assert_eq!((mixed.1, mixed.2), (1.0, 0.0));
        let pure = markers.iter().find(|m| m.0 == Marker::PureA).unwrap();
        assert_eq!((pure.1, pure.2), (0.0, 1.0));
        for class in [SampleClass::TwoNonzero, SampleClass::ThreeNonzero, SampleClass::FourNonzero] {
            assert!(data.iter().filter(|r| r.class == class).count() > 9000);
        }
        assert!(region_check(&data).holds());
    }

    #[test]
    fn region_check_catches_bad_records() {
        let mut data = fig3_dataset(30, 1).unwrap();
        let last = data.len() - 1;
        data[last].y = 0.5;
        let two = data.iter().position(|r| r.class == SampleClass::TwoNonzero && r.marker.is_none()).unwrap();
        data[two].y += 1e-6;
        let check = region_check(&data);
        assert_eq!(check.marker_mismatch, 1);
        assert_eq!(check.off_curve, 1);
        assert_eq!(check.above_threshold, 1);
        assert!(!check.holds());
    }

    #[test]
    fn datasets_do_not_depend_on_thread_count() {
        let run = |threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| (fig2_dataset(300, 9).unwrap(), fig3_dataset(300, 9).unwrap()))
        };
        let (a2, a3) = run(1);
        let (b2, b3) = run(4);
        for (a, b) in a2.iter().zip(&b2).chain(a3.iter().zip(&b3)) {
            assert_eq!(a.x.to_bits(), b.x.to_bits());
            assert_eq!(a.y.to_bits(), b.y.to_bits());
            assert_eq!(a.spectrum, b.spectrum);
        }
    }

    proptest! {
        #[test]
        fn derived_seeds_differ(seed in any::<u64>(), i in 0u64..1_000_000) {
            prop_assert_ne!(derive_seed(seed, i), derive_seed(seed, i + 1));
        }

        #[test]
        fn any_spectrum_below_bound(seed in any::<u64>()) {
            let r = concurrence_record(haar_random_pure(3, seed)).unwrap();
            prop_assert!(!r.violates_bound());
        }
    }
}
