//! Squeezing of a subsystem state as a function of the evolution time under a
//! local Hamiltonian, evaluated in the Hamiltonian's eigenbasis.

use crate::error::{Error, Result};
use crate::optimize::golden_section;
use crate::qcore::{c, CMatrix, DensityMatrix, Propagator, C64};
use crate::spin::{squeezing_from_moments, CollectiveSpinOps, SpinMoments};

/// `(a, b)` index pairs of the symmetrized second moments, in the order the
/// transformed operators are stored after the three means.
const PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];

/// Spectral data of a local Hamiltonian plus the collective spin operators
/// and their symmetrized products, all in that Hamiltonian's eigenbasis.
#[derive(Debug, Clone)]
pub struct SubsystemSweep {
    n_spins: usize,
    propagator: Propagator,
    operators: Vec<CMatrix>,
}

impl SubsystemSweep {
    pub fn new(h: &CMatrix) -> Result<Self> {
        let dim = h.nrows();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::Domain(format!("dimension {dim} is not a qubit register")));
        }
        let n_spins = dim.trailing_zeros() as usize;
        let propagator = Propagator::new(h)?;
        let ops = CollectiveSpinOps::new(n_spins)?;
        let j = [ops.jx(), ops.jy(), ops.jz()];
        let v = &propagator.eigen().vectors;
        let vd = v.adjoint();
        let mut operators: Vec<CMatrix> = j.iter().map(|o| &vd * *o * v).collect();
        for (a, b) in PAIRS {
            let sym = (j[a] * j[b] + j[b] * j[a]) * c(0.5, 0.0);
            operators.push(&vd * sym * v);
        }
        Ok(Self { n_spins, propagator, operators })
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn propagator(&self) -> &Propagator {
        &self.propagator
    }

    /// Binds a subsystem state: `W_o[j, k] = sigma[j, k] O~[k, j]` with
    /// `sigma = V^dagger rho V`.
    pub fn prepare(&self, rho: &DensityMatrix) -> Result<PreparedSweep> {
        let dim = self.propagator.dim();
        if rho.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: rho.dim() });
        }
        let v = &self.propagator.eigen().vectors;
        let sigma = v.adjoint() * rho.matrix() * v;
        let weights = self
            .operators
            .iter()
            .map(|o| CMatrix::from_fn(dim, dim, |j, k| sigma[(j, k)] * o[(k, j)]))
            .collect();
        Ok(PreparedSweep {
            n_spins: self.n_spins,
            energies: self.propagator.eigen().values.clone(),
            weights,
        })
    }
}

/// Result of minimizing `xi^2_A` over the evolution time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepMinimum {
    /// Smallest value on the grid.
    pub grid_min: f64,
    /// Grid point attaining `grid_min`.
    pub grid_argmin: f64,
    /// Golden-section refinement around the grid minimum.
    pub refined_argmin: f64,
    pub refined_min: f64,
}

impl SweepMinimum {
    /// `min(grid_min, refined_min)`.
    pub fn min(&self) -> f64 {
        self.grid_min.min(self.refined_min)
    }

    /// Evolution time attaining [`Self::min`].
    pub fn argmin(&self) -> f64 {
        if self.refined_min < self.grid_min {
            self.refined_argmin
        } else {
            self.grid_argmin
        }
    }
}

#[derive(Debug, Clone)]
pub struct PreparedSweep {
    n_spins: usize,
    energies: Vec<f64>,
    weights: Vec<CMatrix>,
}

impl PreparedSweep {
    /// Spin moments of `e^{-iHt} rho e^{iHt}`.
    pub fn moments(&self, t: f64) -> SpinMoments {
        let phases: Vec<C64> = self.energies.iter().map(|&d| C64::from_polar(1.0, -d * t)).collect();
        let dim = phases.len();
        let mut vals = [0.0f64; 9];
        for k in 0..dim {
            let pk = phases[k].conj();
            for j in 0..dim {
                let q = phases[j] * pk;
                for (val, w) in vals.iter_mut().zip(&self.weights) {
                    let z = w[(j, k)];
                    *val += q.re * z.re - q.im * z.im;
                }
            }
        }
        let mut second = [[0.0; 3]; 3];
        for (&(a, b), v) in PAIRS.iter().zip(&vals[3..]) {
            second[a][b] = *v;
            second[b][a] = *v;
        }
        SpinMoments { n_spins: self.n_spins, mean: [vals[0], vals[1], vals[2]], second }
    }

    pub fn xi2(&self, t: f64) -> f64 {
        squeezing_from_moments(&self.moments(t)).xi2
    }

    /// Minimizes over `grid`, then refines with golden-section search on the
    /// bracket formed by the neighbouring grid points.
    pub fn minimize(&self, grid: &[f64], tol: f64) -> SweepMinimum {
        let (k, grid_min) = grid
            .iter()
            .map(|&t| self.xi2(t))
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
        let lo = grid[k.saturating_sub(1)];
        let hi = grid[(k + 1).min(grid.len() - 1)];
        let refined = golden_section(|t| self.xi2(t), lo, hi, tol);
        SweepMinimum {
            grid_min,
            grid_argmin: grid[k],
            refined_argmin: refined.x,
            refined_min: refined.value,
        }
    }
}
