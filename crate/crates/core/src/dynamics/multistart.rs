use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::graph::{MisSolution, WeightedGraph};

use super::{init_random_stream, init_warm, run_wrgn, DynamicsError, GammaSchedule, WrgnRun};

/// How one trajectory of a multi-start run is initialized.
#[derive(Clone, Debug, PartialEq)]
pub enum StartPoint {
    /// Random start drawn from stream `index` of `seed`.
    Random { seed: u64, index: u64 },
    /// Warm start from a fractional vector.
    Warm { id: String, values: Vec<f64> },
}

impl StartPoint {
    pub fn label(&self) -> String {
        match self {
            StartPoint::Random { seed, index } => format!("seed:{seed}/{index}"),
            StartPoint::Warm { id, .. } => format!("warm:{id}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct StartOutcome {
    pub label: String,
    pub result: Result<(WrgnRun, MisSolution), DynamicsError>,
    /// Time spent in the iteration loop.
    pub elapsed: Duration,
}

/// Runs every start over the shared graph in parallel; outcomes keep start order.
pub fn run_starts(
    g: &WeightedGraph,
    schedule: &GammaSchedule,
    starts: &[StartPoint],
    record_trace: bool,
) -> Vec<StartOutcome> {
    starts
        .par_iter()
        .map(|start| {
            let x0 = match start {
                StartPoint::Random { seed, index } => Ok(init_random_stream(g.n(), *seed, *index)),
                StartPoint::Warm { values, .. } => init_warm(g.n(), values),
            };
            let clock = Instant::now();
            let run = x0.and_then(|x0| run_wrgn(g, &x0, schedule, record_trace));
            let elapsed = clock.elapsed();
            StartOutcome {
                label: start.label(),
                result: run.map(|run| {
                    let mis = super::round_to_mis(g, &run.state);
                    (run, mis)
                }),
                elapsed,
            }
        })
        .collect()
}
