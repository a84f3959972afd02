//! Long local evolutions of a subsystem state, tracking its squeezing and the
//! negativity across an internal split.

use crate::error::{Error, Result};
use crate::hamiltonians::{Hamiltonian, HamiltonianKind};
use crate::measures::negativity_normalized;
use crate::qcore::{c, hermitian_eigen, max_abs_diff, CMatrix, DensityMatrix, Partition, Propagator};
use crate::spin::{squeezing_parameter, CollectiveSpinOps};

use super::linspace;

#[derive(Debug, Clone, PartialEq)]
pub struct ExploreConfig {
    pub h_a_kind: HamiltonianKind,
    /// `omega / Omega` for TF.
    pub transverse_ratio: f64,
    /// Largest `Omega' t'`.
    pub t_max: f64,
    pub steps: usize,
    /// Qubits of `A` on the first side of the internal split; `None` takes
    /// the first half.
    pub split: Option<Vec<usize>>,
}

impl ExploreConfig {
    pub fn new(h_a_kind: HamiltonianKind) -> Self {
        Self { h_a_kind, transverse_ratio: 1.0, t_max: 100.0, steps: 2001, split: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExplorationRow {
    pub tp: f64,
    pub xi2_a: f64,
    pub n_a: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExplorationTrace {
    pub rows: Vec<ExplorationRow>,
    /// Qubits on the first side of the split used for `n_a`.
    pub split: Vec<usize>,
    pub min_xi2_a: f64,
    pub argmin_tp: f64,
    pub max_n_a: f64,
    pub n_a_at_argmin: f64,
    /// Largest elementwise difference between the conjugated state and the
    /// reduced evolved purification.
    pub path_discrepancy: f64,
}

impl ExplorationTrace {
    /// `1 - N_A(argmin xi^2) / max N_A`; zero when the squeezing optimum is
    /// also the most entangled point.
    pub fn relative_gap(&self) -> f64 {
        if self.max_n_a > 0.0 {
            1.0 - self.n_a_at_argmin / self.max_n_a
        } else {
            0.0
        }
    }
}

/// Evolves `rho_a` under `H_A` for `Omega' t'` in `[0, t_max]`, recording
/// `xi^2_A` and the normalized negativity across the split of `A`.
pub fn explore_measure_vs_squeezing(rho_a: &DensityMatrix, cfg: &ExploreConfig) -> Result<ExplorationTrace> {
    let n = rho_a.n_qubits();
    if n < 2 {
        return Err(Error::Domain("the internal split needs at least two qubits".into()));
    }
    if cfg.steps == 0 || !(cfg.t_max >= 0.0) {
        return Err(Error::Config("exploration needs a non-negative time range and steps >= 1".into()));
    }
    let split_a = cfg.split.clone().unwrap_or_else(|| (0..n / 2).collect());
    let split = Partition::with_complement(n, split_a.clone())?;
    let all: Vec<usize> = (0..n).collect();
    let h = Hamiltonian::build_with_transverse(cfg.h_a_kind, 1.0, cfg.transverse_ratio, &all, n)?;
    let prop = Propagator::new(h.matrix())?;
    let ops = CollectiveSpinOps::new(n)?;

    // purification sum_k sqrt(p_k) |k>_A |k>_R as a dim x dim Schmidt matrix
    let eig = hermitian_eigen(rho_a.matrix())?;
    let d = rho_a.dim();
    let purification = CMatrix::from_fn(d, d, |i, k| eig.vectors[(i, k)] * eig.values[k].max(0.0).sqrt());

    let mut rows = Vec::with_capacity(cfg.steps);
    let mut discrepancy = 0.0f64;
    for tp in linspace(0.0, cfg.t_max, cfg.steps) {
        let u = prop.unitary(tp);
        let conj = &u * rho_a.matrix() * u.adjoint();
        let m = &u * &purification;
        let via_purification = &m * m.adjoint();
        discrepancy = discrepancy.max(max_abs_diff(&conj, &via_purification));
        let rho = DensityMatrix::new((&conj + conj.adjoint()) * c(0.5, 0.0))?;
        rows.push(ExplorationRow {
            tp,
            xi2_a: squeezing_parameter(&rho, &ops)?.xi2,
            n_a: negativity_normalized(&rho, &split)?.clamp(0.0, 1.0),
        });
    }
    let best = rows
        .iter()
        .min_by(|a, b| a.xi2_a.total_cmp(&b.xi2_a))
        .copied()
        .expect("at least one row");
    let max_n_a = rows.iter().map(|r| r.n_a).fold(0.0, f64::max);
    Ok(ExplorationTrace {
        rows,
        split: split_a,
        min_xi2_a: best.xi2_a,
        argmin_tp: best.tp,
        max_n_a,
        n_a_at_argmin: best.n_a,
        path_discrepancy: discrepancy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{ProtocolConfig, ProtocolSystem};
    use crate::qcore::{dm_from_pure, PureState};

    #[test]
    fn paths_agree_and_ranges_hold() {
        let sys = ProtocolSystem::new(ProtocolConfig::new(2, 2, HamiltonianKind::Oat, HamiltonianKind::Tf)).unwrap();
        let rho = sys.rho_a_at(0.5).unwrap();
        for kind in [HamiltonianKind::Oat, HamiltonianKind::Tat, HamiltonianKind::Tf] {
            let mut cfg = ExploreConfig::new(kind);
            cfg.steps = 201;
            cfg.t_max = 20.0;
            let tr = explore_measure_vs_squeezing(&rho, &cfg).unwrap();
            assert_eq!(tr.rows.len(), 201);
            assert!(tr.path_discrepancy < 1e-12);
            assert!(tr.rows.iter().all(|r| (0.0..=1.0).contains(&r.n_a) && r.xi2_a >= 0.0));
            assert!(tr.rows.iter().all(|r| r.xi2_a >= tr.min_xi2_a));
            assert!(tr.n_a_at_argmin <= tr.max_n_a);
            assert_eq!(tr.split, vec![0]);
        }
    }

    #[test]
    fn pure_coherent_start() {
        let rho = dm_from_pure(&PureState::all_down(2));
        let mut cfg = ExploreConfig::new(HamiltonianKind::Oat);
        cfg.steps = 11;
        cfg.t_max = 1.0;
        let tr = explore_measure_vs_squeezing(&rho, &cfg).unwrap();
        assert!((tr.rows[0].xi2_a - 1.0).abs() < 1e-12);
        assert!(tr.rows[0].n_a.abs() < 1e-12);
        assert!(tr.min_xi2_a < 1.0);
    }

    #[test]
    fn rejects_single_qubit() {
        let cfg = ExploreConfig::new(HamiltonianKind::Oat);
        assert!(explore_measure_vs_squeezing(&DensityMatrix::maximally_mixed(1), &cfg).is_err());
    }
}
