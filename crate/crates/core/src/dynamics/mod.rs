//! The weighted regularized graph normalization (WRGN) iteration.
//!
//! One step maps a state `x ∈ [0,1]^n` to
//!
//! `x'_i = x_i / (x_i + γ Σ_{j∈N(i)} (v_j / v_i) x_j)`,  `v = √w`,
//!
//! computed, as in the reference module, through the weighted coordinates
//! `y = v ⊙ x` as `x'_i = y_i / (y_i + γ (A y)_i)`.

mod lyapunov;
mod multistart;
mod rounding;
mod schedule;

use std::ops::Deref;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Open01;
use thiserror::Error;

use crate::graph::WeightedGraph;

pub use lyapunov::{energy, fitness, simplex_state, weighted_mass};
pub use multistart::{run_starts, StartOutcome, StartPoint};
pub use rounding::{round_to_mis, ROUNDING_THRESHOLD};
pub use schedule::{GammaSchedule, ScheduleMode};

/// Denominators at or below this value take the fallback output.
pub const SAFE_DIVISION_THRESHOLD: f64 = 1e-9;
/// Output assigned to an entry whose denominator fails the threshold.
pub const FALLBACK_VALUE: f64 = 0.5;
/// Lower clamp for random and warm-start initial states.
pub const INIT_FLOOR: f64 = 1e-3;
/// Step size below which an early exit may fire once γ has reached its final value.
pub const EARLY_EXIT_STEP: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("state has length {got}, graph has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },
    #[error("state entry {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },
    #[error("state entry {index} is negative ({value})")]
    Negative { index: usize, value: f64 },
    #[error("state is not normalizable: closed neighborhood of vertex {0} sums to zero")]
    NotNormalizable(usize),
    #[error("non-finite state produced at iteration {0}")]
    Diverged(usize),
    #[error("weighted mass is zero")]
    ZeroMass,
    #[error("zero fitness denominator at vertex {0}")]
    ZeroDenominator(usize),
    #[error("invalid gamma schedule: {0}")]
    InvalidSchedule(String),
    #[error("gamma must be non-negative and finite, got {0}")]
    InvalidGamma(f64),
}

/// A non-negative finite state vector, the iterate of the dynamics.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector(Vec<f64>);

impl StateVector {
    pub fn new(values: Vec<f64>) -> Result<Self, DynamicsError> {
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(DynamicsError::NonFinite { index, value });
            }
            if value < 0.0 {
                return Err(DynamicsError::Negative { index, value });
            }
        }
        Ok(Self(values))
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Indices of strictly positive entries.
    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] > 0.0).collect()
    }

    /// Largest distance of any entry to {0, 1}.
    pub fn binary_residual(&self) -> f64 {
        self.0.iter().map(|&x| x.min((1.0 - x).abs())).fold(0.0, f64::max)
    }
}

impl Deref for StateVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// One WRGN step written into `out`; returns how many entries took the fallback.
pub fn gn_step_into(g: &WeightedGraph, x: &[f64], gamma: f64, out: &mut [f64]) -> usize {
    let v = g.sqrt_weights();
    let mut fallbacks = 0;
    for i in 0..g.n() {
        let yi = v[i] * x[i];
        let ay: f64 = g.neighbors(i).iter().map(|&j| v[j] * x[j]).sum();
        let denom = gamma * ay + yi;
        out[i] = if denom > SAFE_DIVISION_THRESHOLD {
            yi / denom
        } else {
            fallbacks += 1;
            FALLBACK_VALUE
        };
    }
    fallbacks
}

/// One WRGN step at regularization `gamma`.
pub fn gn_step(g: &WeightedGraph, x: &StateVector, gamma: f64) -> StateVector {
    let mut out = vec![0.0; g.n()];
    gn_step_into(g, x, gamma, &mut out);
    StateVector(out)
}

/// Checks that every closed neighborhood sum of `x` is positive.
pub fn check_normalizable(g: &WeightedGraph, x: &[f64]) -> Result<(), DynamicsError> {
    if x.len() != g.n() {
        return Err(DynamicsError::LengthMismatch {
            expected: g.n(),
            got: x.len(),
        });
    }
    for i in 0..g.n() {
        let closed = x[i] + g.neighbors(i).iter().map(|&j| x[j]).sum::<f64>();
        if !(closed > 0.0) {
            return Err(DynamicsError::NotNormalizable(i));
        }
    }
    Ok(())
}

/// Per-step Lyapunov record. Energies before and after are taken at the same γ.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub gamma: f64,
    pub energy_before: f64,
    pub energy: f64,
    pub mass_before: f64,
    pub mass: f64,
    pub step_norm: f64,
    pub fallbacks: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolveTrace {
    pub records: Vec<StepRecord>,
}

/// Counts of monotonicity violations found in a trace.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LyapunovViolations {
    pub energy: usize,
    pub mass: usize,
    pub checked_steps: usize,
}

impl SolveTrace {
    /// Checks strict energy descent and strict mass growth on every step that
    /// moved by more than `min_step` (∞-norm). A violation is an energy increase
    /// or mass decrease larger than `tol · max(1, |value|)`. Mass is not checked
    /// on the first step, whose input need not be an image of the map.
    pub fn lyapunov_violations(&self, min_step: f64, tol: f64) -> LyapunovViolations {
        let mut out = LyapunovViolations::default();
        for (k, r) in self.records.iter().enumerate() {
            if r.step_norm <= min_step || r.fallbacks > 0 {
                continue;
            }
            out.checked_steps += 1;
            if r.energy - r.energy_before > tol * r.energy_before.abs().max(1.0) {
                out.energy += 1;
            }
            if k > 0 && r.mass_before - r.mass > tol * r.mass_before.abs().max(1.0) {
                out.mass += 1;
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub record_trace: bool,
    /// Stop once γ is final and the step ∞-norm drops below [`EARLY_EXIT_STEP`].
    pub early_exit: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WrgnRun {
    /// Final state, clamped to [0, 1].
    pub state: StateVector,
    pub trace: Option<SolveTrace>,
    pub iterations: usize,
    pub fallback_events: usize,
}

/// Runs the full schedule from `x0`.
pub fn run_wrgn(
    g: &WeightedGraph,
    x0: &StateVector,
    schedule: &GammaSchedule,
    record_trace: bool,
) -> Result<WrgnRun, DynamicsError> {
    run_wrgn_with(
        g,
        x0,
        schedule,
        RunOptions {
            record_trace,
            early_exit: false,
        },
    )
}

pub fn run_wrgn_with(
    g: &WeightedGraph,
    x0: &StateVector,
    schedule: &GammaSchedule,
    options: RunOptions,
) -> Result<WrgnRun, DynamicsError> {
    schedule.validate()?;
    check_normalizable(g, x0)?;

    let mut x = x0.0.clone();
    let mut next = vec![0.0; g.n()];
    let mut trace = options.record_trace.then(SolveTrace::default);
    let mut fallback_events = 0;
    let mut iterations = 0;

    for k in 0..schedule.iterations {
        let gamma = schedule.gamma_at(k);
        let fallbacks = gn_step_into(g, &x, gamma, &mut next);
        fallback_events += fallbacks;
        iterations += 1;

        let mut step_norm: f64 = 0.0;
        for (a, b) in x.iter().zip(&next) {
            if !b.is_finite() {
                return Err(DynamicsError::Diverged(k));
            }
            step_norm = step_norm.max((a - b).abs());
        }
        if let Some(t) = trace.as_mut() {
            t.records.push(StepRecord {
                gamma,
                energy_before: energy(g, &x, gamma),
                energy: energy(g, &next, gamma),
                mass_before: weighted_mass(g, &x),
                mass: weighted_mass(g, &next),
                step_norm,
                fallbacks,
            });
        }
        std::mem::swap(&mut x, &mut next);
        if options.early_exit && schedule.at_final_gamma(k) && step_norm < EARLY_EXIT_STEP {
            break;
        }
    }

    for xi in &mut x {
        *xi = xi.clamp(0.0, 1.0);
    }
    Ok(WrgnRun {
        state: StateVector(x),
        trace,
        iterations,
        fallback_events,
    })
}

/// Random initial state from seed `seed`, RNG stream 0.
pub fn init_random(n: usize, seed: u64) -> StateVector {
    init_random_stream(n, seed, 0)
}

/// Exponential samples `−ln u`, scaled by their maximum and clamped to `[1e-3, 1]`.
///
/// Each `(seed, stream)` pair is an independent, reproducible ChaCha stream.
pub fn init_random_stream(n: usize, seed: u64, stream: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let raw: Vec<f64> = (0..n).map(|_| -rng.sample::<f64, _>(Open01).ln()).collect();
    let max = raw.iter().copied().fold(0.0, f64::max);
    StateVector(raw.iter().map(|r| (r / max).clamp(INIT_FLOOR, 1.0)).collect())
}

/// Warm start from an external fractional vector, clamped to `[1e-3, 1]`.
pub fn init_warm(n: usize, fractional: &[f64]) -> Result<StateVector, DynamicsError> {
    if fractional.len() != n {
        return Err(DynamicsError::LengthMismatch {
            expected: n,
            got: fractional.len(),
        });
    }
    fractional
        .iter()
        .enumerate()
        .map(|(index, &value)| {
            if value.is_finite() {
                Ok(value.clamp(INIT_FLOOR, 1.0))
            } else {
                Err(DynamicsError::NonFinite { index, value })
            }
        })
        .collect::<Result<Vec<_>, _>>()
        .map(StateVector)
}
