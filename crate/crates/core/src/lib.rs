//! Weighted regularized graph normalization (WRGN) for maximum weight independent set.
//!
//! The iteration `x ← x ⊘ ((I + γ diag(v)⁻¹ A diag(v)) x)` with `v = √w` drives a
//! fractional state towards the indicator of a maximal independent set whose
//! weight dominates its neighborhood. Around it sit exact oracles, fixed-point
//! analysis, an atomic-graph census and the text formats used by the CLI.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dynamics;
pub mod enumeration;
pub mod graph;
pub mod io;
pub mod oracle;

pub use graph::{GraphError, MisSolution, SimpleGraph, WeightedGraph};
