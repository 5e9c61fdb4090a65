use serde::{Deserialize, Serialize};

use super::DynamicsError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleMode {
    Constant,
    Linear,
}

/// Plan for the regularization parameter over a fixed iteration budget.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaSchedule {
    pub gamma0: f64,
    pub gamma1: f64,
    pub iterations: usize,
    pub mode: ScheduleMode,
}

impl GammaSchedule {
    /// Default γ-pursuit: 0.9 → 1.5 over 1000 iterations.
    pub const DEFAULT_GAMMA0: f64 = 0.9;
    pub const DEFAULT_GAMMA1: f64 = 1.5;
    pub const DEFAULT_ITERATIONS: usize = 1000;

    pub fn constant(gamma: f64, iterations: usize) -> Result<Self, DynamicsError> {
        let s = Self {
            gamma0: gamma,
            gamma1: gamma,
            iterations,
            mode: ScheduleMode::Constant,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn linear(gamma0: f64, gamma1: f64, iterations: usize) -> Result<Self, DynamicsError> {
        let s = Self {
            gamma0,
            gamma1,
            iterations,
            mode: ScheduleMode::Linear,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn pursuit_default() -> Self {
        Self::linear(
            Self::DEFAULT_GAMMA0,
            Self::DEFAULT_GAMMA1,
            Self::DEFAULT_ITERATIONS,
        )
        .expect("default schedule is valid")
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        let bad = |reason: &str| Err(DynamicsError::InvalidSchedule(reason.to_string()));
        if !(self.gamma0.is_finite() && self.gamma1.is_finite()) {
            return bad("gamma values must be finite");
        }
        if self.gamma0 < 0.0 || self.gamma1 < 0.0 {
            return bad("gamma values must be non-negative");
        }
        if self.iterations == 0 {
            return bad("iterations must be positive");
        }
        match self.mode {
            ScheduleMode::Constant if self.gamma0 != self.gamma1 => {
                bad("constant schedule requires gamma0 == gamma1")
            }
            ScheduleMode::Linear if self.iterations < 2 => {
                bad("linear schedule requires at least 2 iterations")
            }
            _ => Ok(()),
        }
    }

    /// γ used at iteration `k` (0-based).
    pub fn gamma_at(&self, k: usize) -> f64 {
        match self.mode {
            ScheduleMode::Constant => self.gamma0,
            ScheduleMode::Linear => {
                let p = k as f64 / (self.iterations - 1) as f64;
                p * self.gamma1 + (1.0 - p) * self.gamma0
            }
        }
    }

    /// Whether iteration `k` runs at the final γ.
    pub fn at_final_gamma(&self, k: usize) -> bool {
        match self.mode {
            ScheduleMode::Constant => true,
            ScheduleMode::Linear => k + 1 >= self.iterations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_endpoints_are_exact() {
        let s = GammaSchedule::linear(0.9, 1.5, 1000).unwrap();
        assert_eq!(s.gamma_at(0), 0.9);
        assert_eq!(s.gamma_at(999), 1.5);
        assert!((s.gamma_at(333) - (0.9 + 333.0 / 999.0 * 0.6)).abs() < 1e-15);
    }

    #[test]
    fn constant_is_flat() {
        let s = GammaSchedule::constant(1.2, 10).unwrap();
        assert!((0..10).all(|k| s.gamma_at(k) == 1.2));
    }

    #[test]
    fn rejects_invalid() {
        assert!(GammaSchedule::linear(0.9, 1.5, 1).is_err());
        assert!(GammaSchedule::constant(1.0, 0).is_err());
        assert!(GammaSchedule::constant(-1.0, 5).is_err());
        assert!(GammaSchedule::linear(f64::NAN, 1.5, 5).is_err());
    }
}
