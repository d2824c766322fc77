//! Numerical solvers for the time-fractional pseudo-parabolic equation
//!
//! ```text
//! D_t^ρ [u + μ A u] + σ(t) A u = r(t) g,   u(0) = φ,
//! ```
//!
//! with A = −d²/dx² on (0,1) under homogeneous Dirichlet conditions and
//! Caputo derivative order ρ ∈ (0,1).
//!
//! Two independent forward solvers:
//! * [`spectral`] — truncated eigenfunction expansion; each mode solves a
//!   weakly singular Volterra equation by exact-kernel product integration,
//! * [`fd`] — non-uniform L1 scheme on a graded time mesh with second-order
//!   central differences and a Thomas solve per step.
//!
//! The [`inverse`] module recovers an unknown time factor r(t) from a scalar
//! observation F[u(t)] = Φ(t) by fixed-point iteration, with admissibility
//! checks on the functional and an a-priori sup-norm bound as a diagnostic.
//!
//! [`specfun`] provides the underlying two-parameter Mittag-Leffler function
//! (absolute error ≤ 1e-12 on the negative real axis) and Caputo L1
//! differentiation on arbitrary meshes.

pub mod error;
pub mod fd;
pub mod gamma;
pub mod inverse;
pub mod mesh;
pub mod problem;
pub mod quad;
pub mod specfun;
pub mod spectral;

pub use error::{Error, Result};
pub use mesh::{SpaceGrid, TimeMesh};
pub use problem::{ProblemSpec, ScalarFn, SolutionField};

/// Default grading exponent max(1, (2−ρ)/ρ): restores the full L1 order
/// 2−ρ for solutions with the typical t^ρ layer at the origin.
pub fn default_grading(rho: f64) -> f64 {
    ((2.0 - rho) / rho).max(1.0)
}
