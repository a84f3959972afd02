//! Squeezing versus internal entanglement for a pure coherent subsystem
//! evolved under each twisting Hamiltonian, for several subsystem sizes.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hamiltonians::{Hamiltonian, HamiltonianKind};
use crate::measures::linear_entropy;
use crate::qcore::{Partition, Propagator, PureState, Side};
use crate::spin::squeezing_parameter_pure;

use super::linspace;

/// Largest size-2 coincidence distance accepted as "the same locus".
pub const COINCIDENCE_TOL: f64 = 1e-2;
/// Smallest accepted `S_L(argmin xi^2) / max S_L` under TF for sizes >= 4.
pub const TF_ENTROPY_RATIO: f64 = 0.9;

#[derive(Debug, Clone, PartialEq)]
pub struct AppendixBConfig {
    pub sizes: Vec<usize>,
    pub kinds: Vec<HamiltonianKind>,
    pub transverse_ratio: f64,
    /// Largest `Omega t`.
    pub t_max: f64,
    pub steps: usize,
}

impl Default for AppendixBConfig {
    fn default() -> Self {
        Self {
            sizes: vec![2, 4, 6, 8],
            kinds: vec![HamiltonianKind::Oat, HamiltonianKind::Tat, HamiltonianKind::Tf],
            transverse_ratio: 1.0,
            t_max: std::f64::consts::PI,
            steps: 1001,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AppendixBTrace {
    pub size: usize,
    pub kind: HamiltonianKind,
    /// `(Omega t, S_L of the half split, xi^2)`
    pub rows: Vec<(f64, f64, f64)>,
    pub min_xi2: f64,
    pub s_l_at_argmin: f64,
    pub max_s_l: f64,
}

impl AppendixBTrace {
    /// `S_L(argmin xi^2) / max S_L`.
    pub fn entropy_ratio(&self) -> f64 {
        if self.max_s_l > 0.0 {
            self.s_l_at_argmin / self.max_s_l
        } else {
            1.0
        }
    }

    fn locus(&self) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.1, r.2)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AppendixBStudy {
    pub traces: Vec<AppendixBTrace>,
}

/// `max_{p in a} min_{q in b} |p - q|`
fn directed_hausdorff(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    a.iter()
        .map(|p| b.iter().map(|q| (p.0 - q.0).hypot(p.1 - q.1)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

impl AppendixBStudy {
    pub fn trace(&self, size: usize, kind: HamiltonianKind) -> Option<&AppendixBTrace> {
        self.traces.iter().find(|t| t.size == size && t.kind == kind)
    }

    /// Largest, over pairs of Hamiltonians, of the smaller directed Hausdorff
    /// distance between their `(S_L, xi^2)` loci at this size: small when
    /// one locus lies inside the other's attainable region.
    pub fn coincidence(&self, size: usize) -> Option<f64> {
        let loci: Vec<_> = self.traces.iter().filter(|t| t.size == size).map(|t| t.locus()).collect();
        if loci.len() < 2 {
            return None;
        }
        let mut worst = 0.0f64;
        for i in 0..loci.len() {
            for j in i + 1..loci.len() {
                let d = directed_hausdorff(&loci[i], &loci[j]).min(directed_hausdorff(&loci[j], &loci[i]));
                worst = worst.max(d);
            }
        }
        Some(worst)
    }

    /// Human-readable descriptions of every failed trend check: size-2 loci
    /// that do not coincide, and TF traces of size >= 4 whose squeezing
    /// optimum is far from the entropy maximum.
    pub fn trend_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(d) = self.coincidence(2) {
            if d >= COINCIDENCE_TOL {
                out.push(format!("size-2 loci differ by {d:e}"));
            }
        }
        for t in self.traces.iter().filter(|t| t.kind == HamiltonianKind::Tf && t.size >= 4) {
            if t.entropy_ratio() < TF_ENTROPY_RATIO {
                out.push(format!("size {} tf entropy ratio {:.4}", t.size, t.entropy_ratio()));
            }
        }
        out
    }
}

fn run_one(size: usize, kind: HamiltonianKind, cfg: &AppendixBConfig) -> Result<AppendixBTrace> {
    let all: Vec<usize> = (0..size).collect();
    let h = Hamiltonian::build_with_transverse(kind, 1.0, cfg.transverse_ratio, &all, size)?;
    let prop = Propagator::new(h.matrix())?;
    let split = Partition::leading(size, size / 2)?;
    let start = PureState::all_down(size);
    let rows = linspace(0.0, cfg.t_max, cfg.steps)
        .into_iter()
        .map(|t| {
            let psi = prop.evolve(&start, t)?;
            let s_l = linear_entropy(&psi.reduced(&split, Side::A)?)?;
            Ok((t, s_l, squeezing_parameter_pure(&psi).xi2))
        })
        .collect::<Result<Vec<_>>>()?;
    let best = rows.iter().min_by(|a, b| a.2.total_cmp(&b.2)).copied().expect("non-empty");
    Ok(AppendixBTrace {
        size,
        kind,
        min_xi2: best.2,
        s_l_at_argmin: best.1,
        max_s_l: rows.iter().map(|r| r.1).fold(0.0, f64::max),
        rows,
    })
}

pub fn appendix_b_study(cfg: &AppendixBConfig) -> Result<AppendixBStudy> {
    if cfg.steps == 0 || !(cfg.t_max >= 0.0) {
        return Err(Error::Config("study needs a non-negative time range and steps >= 1".into()));
    }
    if let Some(&s) = cfg.sizes.iter().find(|&&s| s == 0 || s % 2 == 1 || s > 8) {
        return Err(Error::Domain(format!("subsystem sizes must be even and at most 8, got {s}")));
    }
    let jobs: Vec<(usize, HamiltonianKind)> =
        cfg.sizes.iter().flat_map(|&s| cfg.kinds.iter().map(move |&k| (s, k))).collect();
    let traces = jobs
        .par_iter()
        .map(|&(s, k)| run_one(s, k, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(AppendixBStudy { traces })
}
