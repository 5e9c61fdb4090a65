//! Fixed-point diagnostics: stability scores, Jacobian spectra, atomic spectra
//! and the weight-tilted simplex quadratic form.

mod atoms;
mod stability;
mod tilted;

use thiserror::Error;

use crate::dynamics::DynamicsError;

pub use atoms::{atom_spectrum, SpectrumClassification, SpectrumKind, ATOM_LP_MARGIN};
pub use stability::{
    fixed_point_residual, jacobian_spectral_radius, jacobian_spectral_radius_with, mis_stability,
    outside_scores, SpectralMethod, SpectralRadius, DENSE_SPECTRUM_MAX_N, FIXED_POINT_TOLERANCE,
};
pub use tilted::{tilted_simplex_q, TILTED_SIMPLEX_TOLERANCE};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("vertex set is not a maximal independent set")]
    NotMaximalIndependent,
    #[error("gamma must be positive and finite, got {0}")]
    InvalidGamma(f64),
    #[error("state is not a fixed point (residual {0:e})")]
    NotFixedPoint(f64),
    #[error("vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("entry {0} is negative or not finite")]
    InvalidEntry(usize),
    #[error("vector is off the weight-tilted simplex: Σ √w_i r_i = {0}")]
    OffSimplex(f64),
    #[error("graph must be connected")]
    Disconnected,
    #[error("graph must have at least one vertex")]
    EmptyGraph,
    #[error("power iteration did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("dense eigensolver failed")]
    EigenFailure,
    #[error("positivity linear program failed: {0}")]
    LinearProgram(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
}
