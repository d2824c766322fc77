//! Error types shared across the solver modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside the supported envelope (e.g. rho, beta, mu).
    #[error("invalid parameter {name}: {value} ({constraint})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// Array lengths do not match the mesh they are supposed to live on.
    #[error("shape mismatch: expected {expected} samples, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    /// An index (mode number, time level) is out of its valid range.
    #[error("index {index} out of range ({constraint})")]
    IndexOutOfRange {
        index: usize,
        constraint: &'static str,
    },

    /// A function argument lies outside the mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature did not converge: achieved {achieved:.3e}, requested {requested:.3e}")]
    QuadratureAccuracy { achieved: f64, requested: f64 },

    /// Picard sweeps on a modal Volterra equation failed to contract.
    #[error("Picard iteration did not converge within {sweeps} sweeps (residual {residual:.3e})")]
    PicardDiverged { sweeps: usize, residual: f64 },

    /// A tridiagonal step system lost strict diagonal dominance.
    #[error("ill-posed tridiagonal system: diagonal dominance violated at row {row}")]
    IllPosedSystem { row: usize },

    /// The observation functional fails a solvability requirement.
    #[error("admissibility condition violated: {condition} (value {value:.3e})")]
    Admissibility { condition: String, value: f64 },

    /// The source-recovery fixed-point iteration hit its sweep cap.
    #[error("source recovery did not converge within {iterations} iterations (last residual {residual:.3e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
