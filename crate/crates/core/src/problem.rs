//! Problem data shared by the spectral and finite-difference solvers.

use crate::error::{Error, Result};
use crate::mesh::{SpaceGrid, TimeMesh};
use std::sync::Arc;

/// Scalar function of a single real variable, shareable across threads.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// All data of the initial-value problem
/// D_t^ρ [u + μ A u] + σ(t) A u = r(t) g,  u(0) = φ,
/// with A = −d²/dx² on (0,1) under homogeneous Dirichlet conditions.
#[derive(Clone)]
pub struct ProblemSpec {
    pub rho: f64,
    pub mu: f64,
    pub horizon: f64,
    pub sigma: ScalarFn,
    /// Known source factor r(t); absent when the spec drives an inverse run.
    pub source_r: Option<ScalarFn>,
    pub phi: ScalarFn,
    pub g: ScalarFn,
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::InvalidParameter {
                name: "rho",
                value: self.rho,
                constraint: "0 < rho < 1",
            });
        }
        if !(self.mu > 0.0) {
            return Err(Error::InvalidParameter {
                name: "mu",
                value: self.mu,
                constraint: "mu > 0",
            });
        }
        if !(self.horizon > 0.0) {
            return Err(Error::InvalidParameter {
                name: "T",
                value: self.horizon,
                constraint: "T > 0",
            });
        }
        Ok(())
    }

    /// Sample min/max of σ on a refinement of `mesh` (σ is user code, not a
    /// symbolic object). The refinement factor 4 matches the mesh the solvers
    /// later evaluate σ on.
    pub fn sigma_bounds(&self, mesh: &TimeMesh) -> Result<SigmaBounds> {
        let m = mesh.steps_count * 4;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..=m {
            // refine each graded panel uniformly
            let coarse = k / 4;
            let frac = (k % 4) as f64 / 4.0;
            let t = if coarse >= mesh.steps_count {
                mesh.horizon
            } else {
                mesh.node(coarse) + frac * mesh.step(coarse + 1)
            };
            let s = (self.sigma)(t);
            lo = lo.min(s);
            hi = hi.max(s);
        }
        if !(lo > 0.0) {
            return Err(Error::InvalidParameter {
                name: "sigma",
                value: lo,
                constraint: "min sigma on [0,T] must be positive",
            });
        }
        Ok(SigmaBounds { min: lo, max: hi })
    }
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("rho", &self.rho)
            .field("mu", &self.mu)
            .field("horizon", &self.horizon)
            .field("source_r", &self.source_r.is_some())
            .finish_non_exhaustive()
    }
}

/// Sampled extrema of σ(t); the modal kernels use `max`, the a-priori
/// estimates use `min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaBounds {
    pub min: f64,
    pub max: f64,
}

/// Nodal solution samples u_i^k on a space-time grid, row per time level.
#[derive(Debug, Clone)]
pub struct SolutionField {
    pub space: SpaceGrid,
    pub time: TimeMesh,
    values: Vec<f64>,
    /// One-sided second-order boundary derivatives u_x(0, t_k), u_x(1, t_k),
    /// kept as diagnostics; the right-end values feed the flux observation.
    pub flux_left: Vec<f64>,
    pub flux_right: Vec<f64>,
}

impl SolutionField {
    pub fn zeros(space: SpaceGrid, time: TimeMesh) -> Self {
        let values = vec![0.0; space.len() * time.len()];
        let m1 = time.len();
        Self {
            space,
            time,
            values,
            flux_left: vec![0.0; m1],
            flux_right: vec![0.0; m1],
        }
    }

    #[inline]
    pub fn value(&self, i: usize, k: usize) -> f64 {
        self.values[k * self.space.len() + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, k: usize, v: f64) {
        self.values[k * self.space.len() + i] = v;
    }

    /// Space profile at time level k.
    pub fn row(&self, k: usize) -> &[f64] {
        let n1 = self.space.len();
        &self.values[k * n1..(k + 1) * n1]
    }

    pub fn row_mut(&mut self, k: usize) -> &mut [f64] {
        let n1 = self.space.len();
        &mut self.values[k * n1..(k + 1) * n1]
    }

    /// Time series at space node i.
    pub fn time_series(&self, i: usize) -> Vec<f64> {
        (0..self.time.len()).map(|k| self.value(i, k)).collect()
    }

    /// Recompute the one-sided boundary derivative diagnostics for level k.
    pub fn update_boundary_fluxes(&mut self, k: usize) {
        let n = self.space.subintervals;
        let h = self.space.h;
        self.flux_left[k] =
            (-3.0 * self.value(0, k) + 4.0 * self.value(1, k) - self.value(2, k)) / (2.0 * h);
        self.flux_right[k] = (3.0 * self.value(n, k) - 4.0 * self.value(n - 1, k)
            + self.value(n - 2, k))
            / (2.0 * h);
    }
}
