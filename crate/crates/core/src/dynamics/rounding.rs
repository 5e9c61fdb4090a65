use std::cmp::Ordering;

use crate::graph::{MisSolution, WeightedGraph};

/// Threshold applied to a converged state before conflict repair.
pub const ROUNDING_THRESHOLD: f64 = 0.5;

/// Rounds a state to a maximal independent set.
///
/// Entries `>= 0.5` become candidates. Conflicts are repaired by dropping the
/// lighter endpoint of each conflicting edge (on equal weight the larger index
/// is kept), then the set is completed greedily by descending weight
/// (smaller index first on ties).
pub fn round_to_mis(g: &WeightedGraph, x: &[f64]) -> MisSolution {
    let n = g.n();
    let w = g.weights();
    let mut member = vec![false; n];

    // Keeping candidates strongest-first realizes the drop-the-lighter-endpoint
    // repair: every dropped vertex has a kept neighbor that outranks it.
    let mut candidates: Vec<usize> = (0..n).filter(|&i| x[i] >= ROUNDING_THRESHOLD).collect();
    candidates.sort_by(|&a, &b| match w[b].partial_cmp(&w[a]).unwrap_or(Ordering::Equal) {
        Ordering::Equal => b.cmp(&a),
        o => o,
    });
    for &i in &candidates {
        if g.neighbors(i).iter().all(|&j| !member[j]) {
            member[i] = true;
        }
    }

    let mut rest: Vec<usize> = (0..n).filter(|&i| !member[i]).collect();
    rest.sort_by(|&a, &b| match w[b].partial_cmp(&w[a]).unwrap_or(Ordering::Equal) {
        Ordering::Equal => a.cmp(&b),
        o => o,
    });
    for &i in &rest {
        if g.neighbors(i).iter().all(|&j| !member[j]) {
            member[i] = true;
        }
    }

    let members: Vec<usize> = (0..n).filter(|&i| member[i]).collect();
    MisSolution::evaluate(g, &members).expect("indices are in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_threshold() {
        let g = WeightedGraph::new(2, &[(0, 1)], &[1.0, 1.0]).unwrap();
        let s = round_to_mis(&g, &[0.99, 0.01]);
        assert_eq!(s.members, vec![0]);
        assert!(s.independent && s.maximal);
    }

    #[test]
    fn equal_weight_conflict_keeps_larger_index() {
        let g = WeightedGraph::new(2, &[(0, 1)], &[1.0, 1.0]).unwrap();
        assert_eq!(round_to_mis(&g, &[0.6, 0.7]).members, vec![1]);
        assert_eq!(round_to_mis(&g, &[0.7, 0.6]).members, vec![1]);
    }

    #[test]
    fn lighter_endpoint_dropped() {
        let g = WeightedGraph::new(2, &[(0, 1)], &[3.0, 1.0]).unwrap();
        assert_eq!(round_to_mis(&g, &[0.6, 0.9]).members, vec![0]);
    }

    #[test]
    fn edgeless_completion() {
        let g = WeightedGraph::new(3, &[], &[1.0; 3]).unwrap();
        assert_eq!(round_to_mis(&g, &[0.2, 0.1, 0.3]).members, vec![0, 1, 2]);
    }

    #[test]
    fn completion_prefers_heavy_vertices() {
        // Path 0-1-2 with a heavy middle: nothing passes the threshold.
        let g = WeightedGraph::new(3, &[(0, 1), (1, 2)], &[1.0, 3.0, 1.0]).unwrap();
        assert_eq!(round_to_mis(&g, &[0.1, 0.2, 0.1]).members, vec![1]);
        let g = WeightedGraph::new(3, &[(0, 1), (1, 2)], &[2.0, 1.0, 2.0]).unwrap();
        assert_eq!(round_to_mis(&g, &[0.1, 0.2, 0.1]).members, vec![0, 2]);
    }

    #[test]
    fn dropped_vertex_does_not_block_lighter_one() {
        // 0 - 1 - 2 with weights 3, 2, 1, all candidates: 1 is dropped for 0,
        // after which 2 no longer conflicts.
        let g = WeightedGraph::new(3, &[(0, 1), (1, 2)], &[3.0, 2.0, 1.0]).unwrap();
        assert_eq!(round_to_mis(&g, &[1.0, 1.0, 1.0]).members, vec![0, 2]);
    }
}
