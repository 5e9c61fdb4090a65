use crate::graph::WeightedGraph;

use super::AnalysisError;

/// Allowed deviation of `Σ √w_i r_i` from 1.
pub const TILTED_SIMPLEX_TOLERANCE: f64 = 1e-9;

/// `rᵀ(I + γA)r` for `r` on the weight-tilted simplex `{r ≥ 0 : Σ √w_i r_i = 1}`.
pub fn tilted_simplex_q(g: &WeightedGraph, r: &[f64], gamma: f64) -> Result<f64, AnalysisError> {
    if r.len() != g.n() {
        return Err(AnalysisError::LengthMismatch {
            expected: g.n(),
            got: r.len(),
        });
    }
    if let Some(i) = r.iter().position(|&ri| !(ri.is_finite() && ri >= 0.0)) {
        return Err(AnalysisError::InvalidEntry(i));
    }
    let tilt: f64 = r.iter().zip(g.sqrt_weights()).map(|(a, b)| a * b).sum();
    if (tilt - 1.0).abs() > TILTED_SIMPLEX_TOLERANCE {
        return Err(AnalysisError::OffSimplex(tilt));
    }
    Ok(quadratic_form(g, r, gamma))
}

/// `rᵀ(I + γA)r` without domain checks.
pub(crate) fn quadratic_form(g: &WeightedGraph, r: &[f64], gamma: f64) -> f64 {
    (0..g.n())
        .map(|i| r[i] * (r[i] + gamma * g.neighbors(i).iter().map(|&j| r[j]).sum::<f64>()))
        .sum()
}
