//! The entanglement-estimation protocol: prepare a state under `H_AB`, evolve
//! subsystem `A` alone under `H_A`, find the smallest squeezing parameter of
//! `A`, and relate it to the A|B linear entropy.

mod appendix_b;
mod calibration;
mod explore;
mod sweep;

pub use appendix_b::{
    appendix_b_study, AppendixBConfig, AppendixBStudy, AppendixBTrace, COINCIDENCE_TOL, TF_ENTROPY_RATIO,
};
pub use calibration::{
    invert, monotonicity_score, CalibrationCurve, CalibrationPoint, Inversion, Relation, Segment, MERGE_TOL,
    RANGE_SLACK, TIE_TOL,
};
pub use explore::{explore_measure_vs_squeezing, ExplorationRow, ExplorationTrace, ExploreConfig};
pub use sweep::{PreparedSweep, SubsystemSweep, SweepMinimum};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hamiltonians::{Hamiltonian, HamiltonianKind};
use crate::measures::linear_entropy;
use crate::qcore::{CMatrix, DensityMatrix, Partition, Propagator, PureState, Side, MAX_QUBITS};
use crate::spin::squeezing_parameter_pure;

/// Largest tolerated change of the A|B negativity along a local sweep.
pub const DRIFT_TOL: f64 = 1e-9;

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| if k + 1 == n { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 })
            .collect(),
    }
}

/// Default `Omega t` range: one period of the twisting dynamics, half a
/// period of the GHZ rotation.
pub fn default_t_max(h_ab: HamiltonianKind) -> f64 {
    match h_ab {
        HamiltonianKind::Ghz => std::f64::consts::FRAC_PI_2,
        _ => std::f64::consts::PI,
    }
}

/// Default `Omega' t'` range searched for the smallest squeezing.
pub fn default_tp_max(h_a: HamiltonianKind) -> f64 {
    match h_a {
        HamiltonianKind::Ghz => std::f64::consts::PI,
        _ => 100.0,
    }
}

pub const DEFAULT_T_STEPS: usize = 201;
pub const DEFAULT_TP_STEPS: usize = 2000;

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    pub n_a: usize,
    pub n_b: usize,
    pub h_ab_kind: HamiltonianKind,
    pub h_a_kind: HamiltonianKind,
    /// `omega / Omega` for TF Hamiltonians. Times are measured in units of
    /// the inverse coupling, so nothing else depends on the couplings.
    pub transverse_ratio: f64,
    /// Values of `Omega t`.
    pub t_grid: Vec<f64>,
    /// Values of `Omega' t'`.
    pub tp_grid: Vec<f64>,
    /// Width in `t'` at which the golden-section refinement stops.
    pub refine_tol: f64,
    /// Evenly spaced `t'` points at which the A|B negativity is rechecked.
    pub drift_points: usize,
    pub seed: u64,
}

impl ProtocolConfig {
    pub fn new(n_a: usize, n_b: usize, h_ab_kind: HamiltonianKind, h_a_kind: HamiltonianKind) -> Self {
        Self {
            n_a,
            n_b,
            h_ab_kind,
            h_a_kind,
            transverse_ratio: 1.0,
            t_grid: linspace(0.0, default_t_max(h_ab_kind), DEFAULT_T_STEPS),
            tp_grid: linspace(0.0, default_tp_max(h_a_kind), DEFAULT_TP_STEPS),
            refine_tol: 1e-6,
            drift_points: 16,
            seed: 0,
        }
    }

    pub fn with_steps(mut self, t_steps: usize, tp_steps: usize) -> Self {
        self.t_grid = linspace(0.0, default_t_max(self.h_ab_kind), t_steps);
        self.tp_grid = linspace(0.0, default_tp_max(self.h_a_kind), tp_steps);
        self
    }

    pub fn n_total(&self) -> usize {
        self.n_a + self.n_b
    }

    /// Whether the closed-form four-qubit GHZ relation applies.
    pub fn is_analytic_ghz(&self) -> bool {
        self.n_a == 2
            && self.n_b == 2
            && self.h_ab_kind == HamiltonianKind::Ghz
            && self.h_a_kind == HamiltonianKind::Ghz
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_total() > MAX_QUBITS {
            return Err(Error::ResourceCap { requested: self.n_total(), cap: MAX_QUBITS });
        }
        if self.n_a == 0 || self.n_b == 0 {
            return Err(Error::Config("both subsystems need at least one qubit".into()));
        }
        for (name, g) in [("t grid", &self.t_grid), ("t' grid", &self.tp_grid)] {
            if g.is_empty() {
                return Err(Error::Config(format!("{name} is empty")));
            }
            if g.iter().any(|v| !v.is_finite()) || g.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::Config(format!("{name} must be finite and strictly increasing")));
            }
        }
        if !(self.refine_tol > 0.0) {
            return Err(Error::Config("refinement tolerance must be positive".into()));
        }
        if !self.transverse_ratio.is_finite() {
            return Err(Error::Config("transverse ratio must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolRow {
    pub t: f64,
    pub s_l_ab: f64,
    pub xi2_ab: f64,
    pub min_xi2_a: f64,
    /// Grid point of `t'` with the smallest sampled squeezing.
    pub argmin_tp: f64,
    /// `t'` attaining `min_xi2_a` after refinement.
    pub refined_tp: f64,
    /// A|B negativity (unnormalized) of the prepared state.
    pub negativity_ab: f64,
    /// Largest change of the A|B negativity seen along the `t'` evolution.
    pub negativity_drift: f64,
    pub nonmonotone: bool,
}

#[derive(Debug, Clone)]
pub struct ProtocolTrace {
    pub config: ProtocolConfig,
    pub rows: Vec<ProtocolRow>,
}

impl ProtocolTrace {
    pub fn calibration(&self) -> Result<CalibrationCurve> {
        calibration(self)
    }

    pub fn max_negativity_drift(&self) -> f64 {
        self.rows.iter().map(|r| r.negativity_drift).fold(0.0, f64::max)
    }
}

pub fn calibration(trace: &ProtocolTrace) -> Result<CalibrationCurve> {
    let pts = trace
        .rows
        .iter()
        .map(|r| CalibrationPoint { t: r.t, min_xi2: r.min_xi2_a, s_l: r.s_l_ab })
        .collect();
    CalibrationCurve::new(pts, trace.config.is_analytic_ghz())
}

/// Unnormalized negativity of a pure bipartite state, `((sum s)^2 - 1) / 2`
/// with `s` the singular values of its Schmidt matrix.
fn pure_negativity(schmidt: &CMatrix) -> f64 {
    let s: f64 = schmidt.singular_values().iter().sum();
    (s * s - 1.0) / 2.0
}

/// Everything needed to evaluate the protocol at arbitrary `t`.
#[derive(Debug, Clone)]
pub struct ProtocolSystem {
    config: ProtocolConfig,
    partition: Partition,
    h_ab: Propagator,
    sweep: SubsystemSweep,
    initial: PureState,
}

impl ProtocolSystem {
    pub fn new(config: ProtocolConfig) -> Result<Self> {
        config.validate()?;
        let n = config.n_total();
        let all: Vec<usize> = (0..n).collect();
        let h_ab = Hamiltonian::build_with_transverse(
            config.h_ab_kind,
            1.0,
            config.transverse_ratio,
            &all,
            n,
        )?;
        let a: Vec<usize> = (0..config.n_a).collect();
        let h_a = Hamiltonian::build_with_transverse(
            config.h_a_kind,
            1.0,
            config.transverse_ratio,
            &a,
            config.n_a,
        )?;
        Ok(Self {
            partition: Partition::leading(n, config.n_a)?,
            h_ab: Propagator::new(h_ab.matrix())?,
            sweep: SubsystemSweep::new(h_a.matrix())?,
            initial: PureState::all_down(n),
            config,
        })
    }

    pub fn config(&self) -> &ProtocolConfig {
        &self.config
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn sweep(&self) -> &SubsystemSweep {
        &self.sweep
    }

    pub fn state_at(&self, t: f64) -> Result<PureState> {
        self.h_ab.evolve(&self.initial, t)
    }

    pub fn rho_a_at(&self, t: f64) -> Result<DensityMatrix> {
        self.state_at(t)?.reduced(&self.partition, Side::A)
    }

    pub fn s_l_at(&self, t: f64) -> Result<f64> {
        linear_entropy(&self.rho_a_at(t)?)
    }

    /// Protocol row at `t`, without the calibration flag.
    pub fn row_at(&self, t: f64) -> Result<ProtocolRow> {
        let cfg = &self.config;
        let psi = self.state_at(t)?;
        let schmidt = psi.schmidt_matrix(&self.partition)?;
        let rho_a = psi.reduced(&self.partition, Side::A)?;
        let prepared = self.sweep.prepare(&rho_a)?;
        let best = prepared.minimize(&cfg.tp_grid, cfg.refine_tol);

        let neg0 = pure_negativity(&schmidt);
        let (lo, hi) = (cfg.tp_grid[0], cfg.tp_grid[cfg.tp_grid.len() - 1]);
        let mut probes = linspace(lo, hi, cfg.drift_points);
        probes.push(best.argmin());
        let drift = probes
            .into_iter()
            .map(|tp| (pure_negativity(&(self.sweep.propagator().unitary(tp) * &schmidt)) - neg0).abs())
            .fold(0.0, f64::max);

        Ok(ProtocolRow {
            t,
            s_l_ab: linear_entropy(&rho_a)?,
            xi2_ab: squeezing_parameter_pure(&psi).xi2,
            min_xi2_a: best.min(),
            argmin_tp: best.grid_argmin,
            refined_tp: best.argmin(),
            negativity_ab: neg0.max(0.0),
            negativity_drift: drift,
            nonmonotone: false,
        })
    }

    pub fn run(&self) -> Result<ProtocolTrace> {
        let rows = self
            .config
            .t_grid
            .par_iter()
            .map(|&t| self.row_at(t))
            .collect::<Result<_>>()?;
        let mut trace = ProtocolTrace { config: self.config.clone(), rows };
        let flags = trace.calibration()?.nonmonotone_flags();
        for (r, f) in trace.rows.iter_mut().zip(flags) {
            r.nonmonotone = f;
        }
        Ok(trace)
    }
}

/// Tolerance on `S_L` when picking reference states from the grid.
pub const REFERENCE_TOL: f64 = 0.005;

/// A trace row chosen as a reference state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferencePoint {
    pub index: usize,
    pub t: f64,
    pub s_l_ab: f64,
    /// Whether `S_L` is within the requested tolerance of the target, as
    /// opposed to merely the closest row with the required flag.
    pub within_tol: bool,
}

fn pick(rows: &[ProtocolRow], level: f64, flagged: bool, last: bool, tol: f64) -> Option<ReferencePoint> {
    let ok = |i: usize| rows[i].nonmonotone == flagged;
    let dist = |i: usize| (rows[i].s_l_ab - level).abs();
    let closer = |a: usize, b: usize| if dist(b) < dist(a) { b } else { a };
    let mut idx: Vec<usize> = (0..rows.len()).filter(|&i| ok(i)).collect();
    // rows adjacent to a crossing of `level`, closest side first
    let mut crossings: Vec<usize> = rows
        .windows(2)
        .enumerate()
        .filter(|(_, w)| (w[0].s_l_ab - level) * (w[1].s_l_ab - level) <= 0.0)
        .filter_map(|(i, _)| match (ok(i), ok(i + 1)) {
            (true, true) => Some(closer(i, i + 1)),
            (true, false) => Some(i),
            (false, true) => Some(i + 1),
            (false, false) => None,
        })
        .collect();
    if last {
        idx.reverse();
        crossings.reverse();
    }
    let chosen = idx
        .iter()
        .copied()
        .find(|&i| dist(i) <= tol)
        .or_else(|| crossings.first().copied())
        .or_else(|| idx.iter().copied().reduce(closer))?;
    Some(ReferencePoint { index: chosen, t: rows[chosen].t, s_l_ab: rows[chosen].s_l_ab, within_tol: dist(chosen) <= tol })
}

/// Reference states of a trace: `p1` is the first unflagged row with
/// `S_L = low`, `p2` the first unflagged row with `S_L = high` and `p3` the
/// last flagged row with `S_L = high`, each within `tol`. Without such a row
/// the flagged-as-required row closest to the first (last, for `p3`) crossing
/// of the level is taken, or failing that the closest such row overall.
pub fn reference_states(trace: &ProtocolTrace, low: f64, high: f64, tol: f64) -> ReferenceStates {
    let rows = &trace.rows;
    ReferenceStates {
        p1: pick(rows, low, false, false, tol),
        p2: pick(rows, high, false, false, tol),
        p3: pick(rows, high, true, true, tol),
    }
}

/// The three reference states, when the trace reaches them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceStates {
    pub p1: Option<ReferencePoint>,
    pub p2: Option<ReferencePoint>,
    pub p3: Option<ReferencePoint>,
}

pub fn run_protocol(cfg: ProtocolConfig) -> Result<ProtocolTrace> {
    ProtocolSystem::new(cfg)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::ghz_protocol_analytics;
    use crate::measures::negativity_raw;
    use crate::qcore::dm_from_pure;
    use HamiltonianKind::*;

    #[test]
    fn ghz_trace_matches_closed_form() {
        let cfg = ProtocolConfig::new(2, 2, Ghz, Ghz).with_steps(41, 400);
        let trace = run_protocol(cfg).unwrap();
        for r in &trace.rows {
            let a = ghz_protocol_analytics(r.t, 0.0);
            assert!((r.xi2_ab - 1.0).abs() < 1e-9, "{r:?}");
            assert!((r.s_l_ab - a.s_l_ab).abs() < 1e-9);
            assert!((r.min_xi2_a - a.min_xi2_a).abs() < 1e-9, "{r:?} vs {}", a.min_xi2_a);
            assert!(r.negativity_drift < DRIFT_TOL);
            assert!(trace.config.tp_grid.contains(&r.argmin_tp));
        }
        assert!(trace.rows.iter().all(|r| !r.nonmonotone));
        assert!((monotonicity_score(&trace.calibration().unwrap()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ghz_grid_minimum_within_resolution() {
        let cfg = ProtocolConfig::new(2, 2, Ghz, Ghz).with_steps(11, 50);
        let step = cfg.tp_grid[1] - cfg.tp_grid[0];
        let sys = ProtocolSystem::new(cfg).unwrap();
        for k in 0..11 {
            let t = k as f64 * 0.15;
            let rho = sys.rho_a_at(t).unwrap();
            let p = sys.sweep().prepare(&rho).unwrap();
            let m = p.minimize(&sys.config().tp_grid, 1e-6);
            let exact = ghz_protocol_analytics(t, 0.0).min_xi2_a;
            assert!((m.grid_min - exact).abs() <= 2.0 * step);
        }
    }

    #[test]
    fn oat_reaches_ghz_at_quarter_period() {
        for h_a in [Oat, Tat, Tf] {
            let mut cfg = ProtocolConfig::new(2, 2, Oat, h_a);
            cfg.t_grid = vec![std::f64::consts::FRAC_PI_2];
            cfg.tp_grid = linspace(0.0, 100.0, 400);
            let sys = ProtocolSystem::new(cfg).unwrap();
            let psi = sys.state_at(std::f64::consts::FRAC_PI_2).unwrap();
            // GHZ up to a relative phase between |0000> and |1111>
            let a = psi.amplitudes();
            assert!((a[0].norm_sqr() - 0.5).abs() < 1e-9 && (a[15].norm_sqr() - 0.5).abs() < 1e-9, "{a:?}");
            let row = sys.row_at(std::f64::consts::FRAC_PI_2).unwrap();
            assert!((row.min_xi2_a - 1.0).abs() < 1e-6, "{h_a}: {row:?}");
        }
    }

    #[test]
    fn drift_agrees_with_partial_transpose() {
        let mut cfg = ProtocolConfig::new(2, 2, Oat, Tf);
        cfg.tp_grid = linspace(0.0, 20.0, 100);
        let sys = ProtocolSystem::new(cfg).unwrap();
        let psi = sys.state_at(0.4).unwrap();
        let p = sys.partition().clone();
        let base = negativity_raw(&dm_from_pure(&psi), &p).unwrap();
        let row = sys.row_at(0.4).unwrap();
        assert!((row.negativity_ab - base).abs() < 1e-9);
        assert!(row.negativity_drift < DRIFT_TOL);
        for tp in [0.5, 3.0, 17.0] {
            let m = sys.sweep().propagator().unitary(tp) * psi.schmidt_matrix(&p).unwrap();
            let moved = PureState::from_schmidt_matrix(&p, &m).unwrap();
            assert!((negativity_raw(&dm_from_pure(&moved), &p).unwrap() - base).abs() < 1e-9);
        }
    }

    #[test]
    fn sweep_start_equals_direct_squeezing() {
        let cfg = ProtocolConfig::new(2, 3, Oat, Tat).with_steps(3, 10);
        let sys = ProtocolSystem::new(cfg).unwrap();
        let ops = crate::spin::CollectiveSpinOps::new(2).unwrap();
        for t in [0.0, 0.7, 2.1] {
            let rho = sys.rho_a_at(t).unwrap();
            let direct = crate::spin::squeezing_parameter(&rho, &ops).unwrap().xi2;
            assert!((sys.sweep().prepare(&rho).unwrap().xi2(0.0) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn config_validation() {
        assert!(matches!(
            ProtocolSystem::new(ProtocolConfig::new(6, 5, Oat, Oat)),
            Err(Error::ResourceCap { requested: 11, cap: 10 })
        ));
        let mut cfg = ProtocolConfig::new(2, 2, Oat, Oat);
        cfg.t_grid.clear();
        assert!(matches!(run_protocol(cfg), Err(Error::Config(_))));
        let mut cfg = ProtocolConfig::new(2, 2, Oat, Oat);
        cfg.tp_grid = vec![1.0, 0.5];
        assert!(matches!(run_protocol(cfg), Err(Error::Config(_))));
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        assert_eq!(linspace(2.0, 3.0, 1), vec![2.0]);
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }

    #[test]
    fn reference_states_follow_flags() {
        let cfg = ProtocolConfig::new(2, 2, Oat, Tf).with_steps(5, 10);
        let mk = |t: f64, s_l_ab: f64, nonmonotone: bool| ProtocolRow {
            t,
            s_l_ab,
            xi2_ab: 1.0,
            min_xi2_a: 1.0,
            argmin_tp: 0.0,
            refined_tp: 0.0,
            negativity_ab: 0.0,
            negativity_drift: 0.0,
            nonmonotone,
        };
        let rows = vec![
            mk(0.0, 0.0, false),
            mk(1.0, 0.102, false),
            mk(2.0, 0.698, false),
            mk(3.0, 0.701, true),
            mk(4.0, 0.7, true),
            mk(5.0, 0.71, true),
            mk(6.0, 0.7, false),
        ];
        let mut trace = ProtocolTrace { config: cfg, rows };
        let refs = reference_states(&trace, 0.1, 0.7, REFERENCE_TOL);
        assert_eq!(refs.p1.unwrap().index, 1);
        assert_eq!(refs.p2.unwrap().index, 2);
        assert_eq!(refs.p3.unwrap().index, 4);
        assert!(refs.p1.unwrap().within_tol);
        let mid = reference_states(&trace, 0.06, 0.705, REFERENCE_TOL);
        assert_eq!(mid.p1.unwrap().index, 1);
        assert!(!mid.p1.unwrap().within_tol);
        let far = reference_states(&trace, 0.3, 0.9, REFERENCE_TOL);
        assert_eq!(far.p2.unwrap().index, 6);
        assert!(!far.p2.unwrap().within_tol);
        assert_eq!(far.p3.unwrap().index, 5);
        trace.rows.iter_mut().for_each(|r| r.nonmonotone = false);
        assert!(reference_states(&trace, 0.1, 0.7, REFERENCE_TOL).p3.is_none());
    }
}
