//! Exact small-graph references: MWIS by branch and bound, maximal independent
//! set enumeration, and a numerical check that stable fixed points coincide with
//! local minima of the tilted quadratic form.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use thiserror::Error;

use crate::analysis::{mis_stability, AnalysisError};
use crate::graph::{GraphError, MisSolution, WeightedGraph};

pub const BRUTE_FORCE_MAX_N: usize = 32;
pub const ENUMERATE_MAX_N: usize = 24;
pub const CORRESPONDENCE_MAX_N: usize = 16;

/// Infinity-norm of each sampled perturbation.
pub const PERTURBATION_SCALE: f64 = 1e-4;
/// A sampled decrease of `Q` larger than this refutes local minimality.
pub const LOCAL_MIN_TOLERANCE: f64 = 1e-12;
/// Relative tolerance for `Q(r_M) = 1 / W(M)`.
pub const Q_IDENTITY_TOLERANCE: f64 = 1e-12;
/// Stability scores inside `[1 - MARGIN, 1 + MARGIN]` are not judged.
pub const STABILITY_MARGIN: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("order {n} exceeds the oracle limit of {max}")]
    TooLarge { n: usize, max: usize },
    #[error("gamma must exceed 1 and be finite, got {0}")]
    InvalidGamma(f64),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn check_order(n: usize, max: usize) -> Result<(), OracleError> {
    if n > max {
        return Err(OracleError::TooLarge { n, max });
    }
    Ok(())
}

fn masks(g: &WeightedGraph) -> Vec<u64> {
    (0..g.n())
        .map(|i| g.neighbors(i).iter().fold(0u64, |m, &j| m | 1 << j))
        .collect()
}

fn members_of(mask: u64) -> Vec<usize> {
    (0..64).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Exact maximum weight independent set by depth-first branch and bound.
pub fn brute_force_mwis(g: &WeightedGraph) -> Result<MisSolution, OracleError> {
    check_order(g.n(), BRUTE_FORCE_MAX_N)?;
    let adj = masks(g);
    let mut search = Mwis {
        adj: &adj,
        w: g.weights(),
        best: -1.0,
        best_set: 0,
    };
    let all = if g.n() == 0 { 0 } else { (1u64 << g.n()) - 1 };
    search.dfs(all, 0, 0.0);
    Ok(MisSolution::evaluate(g, &members_of(search.best_set))?)
}

struct Mwis<'a> {
    adj: &'a [u64],
    w: &'a [f64],
    best: f64,
    best_set: u64,
}

impl Mwis<'_> {
    fn dfs(&mut self, cand: u64, set: u64, weight: f64) {
        if cand == 0 {
            if weight > self.best {
                self.best = weight;
                self.best_set = set;
            }
            return;
        }
        let bound: f64 = weight + members_of(cand).iter().map(|&i| self.w[i]).sum::<f64>();
        if bound <= self.best {
            return;
        }
        let v = cand.trailing_zeros() as usize;
        self.dfs(cand & !self.adj[v] & !(1 << v), set | 1 << v, weight + self.w[v]);
        self.dfs(cand & !(1 << v), set, weight);
    }
}

/// Every maximal independent set, each sorted, in lexicographic order.
///
/// Bron–Kerbosch with pivoting on the complement graph.
pub fn enumerate_mises(g: &WeightedGraph) -> Result<Vec<Vec<usize>>, OracleError> {
    let n = g.n();
    check_order(n, ENUMERATE_MAX_N)?;
    if n == 0 {
        return Ok(vec![Vec::new()]);
    }
    let all = (1u64 << n) - 1;
    // Closed neighborhoods; complement neighbors of v are `all & !closed[v]`.
    let closed: Vec<u64> = masks(g).iter().enumerate().map(|(i, m)| m | 1 << i).collect();
    let mut out = Vec::new();
    bron_kerbosch(&closed, all, 0, all, 0, &mut out);
    let mut sets: Vec<Vec<usize>> = out.into_iter().map(members_of).collect();
    sets.sort();
    Ok(sets)
}

fn bron_kerbosch(closed: &[u64], all: u64, r: u64, mut p: u64, mut x: u64, out: &mut Vec<u64>) {
    if p == 0 {
        if x == 0 {
            out.push(r);
        }
        return;
    }
    let pivot = members_of(p | x)
        .into_iter()
        .max_by_key(|&u| (p & !closed[u]).count_ones())
        .expect("p is non-empty");
    let mut branch = p & closed[pivot];
    while branch != 0 {
        let v = branch.trailing_zeros() as usize;
        branch &= branch - 1;
        let nv = all & !closed[v];
        bron_kerbosch(closed, all, r | 1 << v, p & nv, x & nv, out);
        p &= !(1 << v);
        x |= 1 << v;
    }
}

/// Diagnostics for one maximal independent set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MisCheck {
    pub members: Vec<usize>,
    pub weight: f64,
    /// `Q(r_M)` where `r_M` is the tilted-simplex point supported on `M`.
    pub q: f64,
    pub stability: f64,
    pub local_min_verified: bool,
    /// Smallest sampled change of `Q`.
    pub min_delta_q: f64,
}

impl MisCheck {
    pub fn q_identity_holds(&self) -> bool {
        (self.q * self.weight - 1.0).abs() <= Q_IDENTITY_TOLERANCE
    }

    pub fn in_margin(&self) -> bool {
        (self.stability - 1.0).abs() <= STABILITY_MARGIN
    }

    /// Clearly stable but not a sampled local minimum, or clearly unstable but one.
    pub fn is_violation(&self) -> bool {
        (self.stability > 1.0 + STABILITY_MARGIN && !self.local_min_verified)
            || (self.stability < 1.0 - STABILITY_MARGIN && self.local_min_verified)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub gamma: f64,
    pub mwis: MisSolution,
    pub mises: Vec<MisCheck>,
    pub violations: usize,
    pub marginal: usize,
    pub q_identity_failures: usize,
}

/// Checks, for every maximal independent set `M`, that dynamic stability at `gamma`
/// matches sampled local minimality of `Q(r) = rᵀ(I + γA)r` on the tilted simplex.
pub fn correspondence_check(
    g: &WeightedGraph,
    gamma: f64,
    perturbations: usize,
    seed: u64,
) -> Result<OracleReport, OracleError> {
    let n = g.n();
    check_order(n, CORRESPONDENCE_MAX_N)?;
    if !(gamma.is_finite() && gamma > 1.0) {
        return Err(OracleError::InvalidGamma(gamma));
    }
    let mwis = brute_force_mwis(g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mises = Vec::new();
    for members in enumerate_mises(g)? {
        let solution = MisSolution::evaluate(g, &members)?;
        let stability = mis_stability(g, &solution, gamma)?;
        let (q, min_delta_q) = probe(g, &members, solution.weight, gamma, perturbations, &mut rng);
        mises.push(MisCheck {
            members,
            weight: solution.weight,
            q,
            stability,
            local_min_verified: min_delta_q >= -LOCAL_MIN_TOLERANCE,
            min_delta_q,
        });
    }
    Ok(OracleReport {
        gamma,
        mwis,
        violations: mises.iter().filter(|m| m.is_violation()).count(),
        marginal: mises.iter().filter(|m| m.in_margin()).count(),
        q_identity_failures: mises.iter().filter(|m| !m.q_identity_holds()).count(),
        mises,
    })
}

/// Returns `Q(r_M)` and the smallest sampled `Q(r_M + δ) − Q(r_M)`.
fn probe(
    g: &WeightedGraph,
    members: &[usize],
    weight: f64,
    gamma: f64,
    perturbations: usize,
    rng: &mut ChaCha8Rng,
) -> (f64, f64) {
    let n = g.n();
    let v = g.sqrt_weights();
    let mut in_m = vec![false; n];
    for &i in members {
        in_m[i] = true;
    }
    let outside: Vec<usize> = (0..n).filter(|&i| !in_m[i]).collect();
    let mut r = vec![0.0; n];
    for &i in members {
        r[i] = v[i] / weight;
    }
    let b = |x: &[f64], i: usize| x[i] + gamma * g.neighbors(i).iter().map(|&j| x[j]).sum::<f64>();
    let br: Vec<f64> = (0..n).map(|i| b(&r, i)).collect();
    let q: f64 = r.iter().zip(&br).map(|(a, c)| a * c).sum();
    let vm_norm2: f64 = members.iter().map(|&j| v[j] * v[j]).sum();

    let mut min_delta = f64::INFINITY;
    let mut delta = vec![0.0; n];
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < perturbations && attempts < 4 * perturbations + 16 {
        attempts += 1;
        delta.iter_mut().for_each(|d| *d = 0.0);
        // Single-vertex directions first so each outside vertex is probed.
        let kind = if attempts <= outside.len() { 0 } else { rng.random_range(0..3) };
        match kind {
            0 if !outside.is_empty() => {
                let i = if attempts <= outside.len() {
                    outside[attempts - 1]
                } else {
                    outside[rng.random_range(0..outside.len())]
                };
                delta[i] = 1.0;
            }
            1 if !outside.is_empty() => {
                for &i in &outside {
                    delta[i] = rng.sample::<f64, _>(StandardNormal).abs();
                }
            }
            _ => {}
        }
        for &j in members {
            delta[j] = rng.sample::<f64, _>(StandardNormal);
        }
        let raw_scale = delta.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        // Stay on the tilted simplex.
        if vm_norm2 > 0.0 {
            let drift: f64 = delta.iter().zip(v).map(|(d, vi)| d * vi).sum::<f64>() / vm_norm2;
            for &j in members {
                delta[j] -= drift * v[j];
            }
        }
        let scale = delta.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        // Projection cancelled the direction (no tangent space when |M| = 1).
        if scale <= 1e-9 * raw_scale {
            continue;
        }
        delta.iter_mut().for_each(|d| *d *= PERTURBATION_SCALE / scale);
        if r.iter().zip(&delta).any(|(a, d)| a + d < 0.0) {
            continue;
        }
        let first: f64 = delta.iter().zip(&br).map(|(d, c)| d * c).sum();
        let second: f64 = (0..n).map(|i| delta[i] * b(&delta, i)).sum();
        min_delta = min_delta.min(2.0 * first + second);
        accepted += 1;
    }
    (q, min_delta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mwis_small() {
        let p3 = WeightedGraph::new(3, &[(0, 1), (1, 2)], &[1.0, 3.0, 1.0]).unwrap();
        assert_eq!(brute_force_mwis(&p3).unwrap().members, vec![1]);
        let p3 = WeightedGraph::new(3, &[(0, 1), (1, 2)], &[2.0, 3.0, 2.0]).unwrap();
        let s = brute_force_mwis(&p3).unwrap();
        assert_eq!((s.members.clone(), s.weight), (vec![0, 2], 4.0));
        let empty = WeightedGraph::new(0, &[], &[]).unwrap();
        assert!(brute_force_mwis(&empty).unwrap().members.is_empty());
    }

    #[test]
    fn mis_enumeration() {
        let c4 = WeightedGraph::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], &[1.0; 4]).unwrap();
        assert_eq!(enumerate_mises(&c4).unwrap(), vec![vec![0, 2], vec![1, 3]]);
        let star = WeightedGraph::new(4, &[(0, 1), (0, 2), (0, 3)], &[1.0; 4]).unwrap();
        assert_eq!(enumerate_mises(&star).unwrap(), vec![vec![0], vec![1, 2, 3]]);
        let k3 = WeightedGraph::new(3, &[(0, 1), (0, 2), (1, 2)], &[1.0; 3]).unwrap();
        assert_eq!(enumerate_mises(&k3).unwrap().len(), 3);
    }

    #[test]
    fn correspondence_on_star() {
        let star = WeightedGraph::new(4, &[(0, 1), (0, 2), (0, 3)], &[1.0; 4]).unwrap();
        let report = correspondence_check(&star, 1.5, 64, 7).unwrap();
        assert_eq!(report.violations, 0);
        assert_eq!(report.q_identity_failures, 0);
        let center = report.mises.iter().find(|m| m.members == vec![0]).unwrap();
        assert!(center.local_min_verified && (center.stability - 1.5).abs() < 1e-12);
        // Heavy center: the leaves score 1.5·3·√(1/36) = 0.75 and are unstable.
        let heavy = WeightedGraph::new(4, &[(0, 1), (0, 2), (0, 3)], &[36.0, 1.0, 1.0, 1.0]).unwrap();
        let report = correspondence_check(&heavy, 1.5, 64, 7).unwrap();
        let leaves = report.mises.iter().find(|m| m.members == vec![1, 2, 3]).unwrap();
        assert!((leaves.stability - 0.75).abs() < 1e-12);
        assert!(!leaves.local_min_verified);
        assert_eq!(report.violations, 0);
    }

    #[test]
    fn limits() {
        let g = WeightedGraph::new(17, &[], &[1.0; 17]).unwrap();
        assert!(matches!(correspondence_check(&g, 1.5, 8, 0), Err(OracleError::TooLarge { .. })));
        let k2 = WeightedGraph::new(2, &[(0, 1)], &[1.0; 2]).unwrap();
        assert!(matches!(correspondence_check(&k2, 1.0, 8, 0), Err(OracleError::InvalidGamma(_))));
    }
}
