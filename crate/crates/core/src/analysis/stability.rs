use nalgebra::DMatrix;

use crate::dynamics::{check_normalizable, gn_step_into};
use crate::graph::{MisSolution, WeightedGraph};

use super::AnalysisError;

/// Residual below which a state is accepted as a fixed point for Jacobian analysis.
pub const FIXED_POINT_TOLERANCE: f64 = 1e-8;
/// Largest order handled by the dense eigensolver.
pub const DENSE_SPECTRUM_MAX_N: usize = 512;

const POWER_TOLERANCE: f64 = 1e-10;
const POWER_MAX_ITERATIONS: usize = 100_000;

/// Per outside vertex `i`: `γ Σ_{j∈N(i)∩M} √(w_j / w_i)`.
pub fn outside_scores(g: &WeightedGraph, members: &[bool], gamma: f64) -> Vec<(usize, f64)> {
    let v = g.sqrt_weights();
    (0..g.n())
        .filter(|&i| !members[i])
        .map(|i| {
            let s: f64 = g
                .neighbors(i)
                .iter()
                .filter(|&&j| members[j])
                .map(|&j| v[j] / v[i])
                .sum();
            (i, gamma * s)
        })
        .collect()
}

/// Stability score of a maximal independent set: the minimum outside score.
///
/// A set is an asymptotically stable fixed point of the dynamics iff the score
/// exceeds 1. Returns `f64::INFINITY` when no vertex lies outside `m`.
pub fn mis_stability(g: &WeightedGraph, m: &MisSolution, gamma: f64) -> Result<f64, AnalysisError> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(AnalysisError::InvalidGamma(gamma));
    }
    if !g.is_maximal_independent(&m.members)? {
        return Err(AnalysisError::NotMaximalIndependent);
    }
    let mut members = vec![false; g.n()];
    for &i in &m.members {
        members[i] = true;
    }
    Ok(outside_scores(g, &members, gamma)
        .into_iter()
        .map(|(_, s)| s)
        .fold(f64::INFINITY, f64::min))
}

/// `‖x − step(x)‖_∞` at regularization `gamma`.
pub fn fixed_point_residual(g: &WeightedGraph, x: &[f64], gamma: f64) -> Result<f64, AnalysisError> {
    check_normalizable(g, x)?;
    let mut next = vec![0.0; g.n()];
    gn_step_into(g, x, gamma, &mut next);
    Ok(x.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralMethod {
    /// Dense eigensolve up to [`DENSE_SPECTRUM_MAX_N`], singular-value bound above.
    Auto,
    Dense,
    /// Largest singular value of J by power iteration on JᵀJ (an upper bound).
    SingularValueBound,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralRadius {
    pub value: f64,
    /// False when `value` is only the singular-value upper bound.
    pub exact: bool,
}

/// Spectral radius of the Jacobian of the map at a fixed point `x`.
pub fn jacobian_spectral_radius(
    g: &WeightedGraph,
    x: &[f64],
    gamma: f64,
) -> Result<SpectralRadius, AnalysisError> {
    jacobian_spectral_radius_with(g, x, gamma, SpectralMethod::Auto)
}

pub fn jacobian_spectral_radius_with(
    g: &WeightedGraph,
    x: &[f64],
    gamma: f64,
    method: SpectralMethod,
) -> Result<SpectralRadius, AnalysisError> {
    let residual = fixed_point_residual(g, x, gamma)?;
    if !(residual < FIXED_POINT_TOLERANCE) {
        return Err(AnalysisError::NotFixedPoint(residual));
    }
    let jac = Jacobian::new(g, x, gamma);
    match method {
        SpectralMethod::Dense => jac.dense_radius(),
        SpectralMethod::SingularValueBound => jac.singular_value_bound(),
        SpectralMethod::Auto if g.n() <= DENSE_SPECTRUM_MAX_N => jac.dense_radius(),
        SpectralMethod::Auto => jac.singular_value_bound(),
    }
}

/// `J_ij = (δ_ij − x_i B_ij) / (Bx)_i` with `B = I + γ diag(v)⁻¹ A diag(v)`.
struct Jacobian<'a> {
    g: &'a WeightedGraph,
    x: &'a [f64],
    gamma: f64,
    bx: Vec<f64>,
}

impl<'a> Jacobian<'a> {
    fn new(g: &'a WeightedGraph, x: &'a [f64], gamma: f64) -> Self {
        let v = g.sqrt_weights();
        let bx = (0..g.n())
            .map(|i| x[i] + gamma * g.neighbors(i).iter().map(|&j| v[j] / v[i] * x[j]).sum::<f64>())
            .collect();
        Self { g, x, gamma, bx }
    }

    fn dense(&self) -> DMatrix<f64> {
        let n = self.g.n();
        let v = self.g.sqrt_weights();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = (1.0 - self.x[i]) / self.bx[i];
            for &j in self.g.neighbors(i) {
                m[(i, j)] = -self.x[i] * self.gamma * v[j] / v[i] / self.bx[i];
            }
        }
        m
    }

    fn dense_radius(&self) -> Result<SpectralRadius, AnalysisError> {
        let schur = self
            .dense()
            .try_schur(1e-14, 10_000)
            .ok_or(AnalysisError::EigenFailure)?;
        let value = schur
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        Ok(SpectralRadius { value, exact: true })
    }

    fn apply(&self, u: &[f64], out: &mut [f64]) {
        let v = self.g.sqrt_weights();
        for i in 0..self.g.n() {
            let bu = u[i] + self.gamma * self.g.neighbors(i).iter().map(|&j| v[j] / v[i] * u[j]).sum::<f64>();
            out[i] = (u[i] - self.x[i] * bu) / self.bx[i];
        }
    }

    fn apply_transpose(&self, u: &[f64], out: &mut [f64]) {
        let v = self.g.sqrt_weights();
        let s: Vec<f64> = u.iter().zip(&self.bx).map(|(a, b)| a / b).collect();
        for i in 0..self.g.n() {
            // (Bᵀz)_i with z = x ⊙ s
            let bz = self.x[i] * s[i]
                + self.gamma * self.g.neighbors(i).iter().map(|&j| v[i] / v[j] * self.x[j] * s[j]).sum::<f64>();
            out[i] = s[i] - bz;
        }
    }

    fn singular_value_bound(&self) -> Result<SpectralRadius, AnalysisError> {
        let n = self.g.n();
        let mut u: Vec<f64> = (0..n).map(|i| 1.0 + (i % 7) as f64 * 1e-3).collect();
        let mut tmp = vec![0.0; n];
        let mut next = vec![0.0; n];
        let mut estimate = 0.0;
        for _ in 0..POWER_MAX_ITERATIONS {
            let norm = u.iter().map(|a| a * a).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Ok(SpectralRadius { value: 0.0, exact: false });
            }
            u.iter_mut().for_each(|a| *a /= norm);
            self.apply(&u, &mut tmp);
            self.apply_transpose(&tmp, &mut next);
            let lambda: f64 = u.iter().zip(&next).map(|(a, b)| a * b).sum();
            std::mem::swap(&mut u, &mut next);
            if (lambda - estimate).abs() <= POWER_TOLERANCE * lambda.abs().max(1e-300) {
                return Ok(SpectralRadius {
                    value: lambda.max(0.0).sqrt(),
                    exact: false,
                });
            }
            estimate = lambda;
        }
        Err(AnalysisError::NoConvergence(POWER_MAX_ITERATIONS))
    }
}
