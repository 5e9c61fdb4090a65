#![allow(dead_code)]

use graphnorm::WeightedGraph;
use proptest::prelude::*;

/// Maximum weight over all 2^n vertex subsets that are independent.
pub fn exhaustive_mwis_weight(g: &WeightedGraph) -> f64 {
    let n = g.n();
    assert!(n <= 20);
    let adj: Vec<u32> = (0..n).map(|i| g.neighbors(i).iter().fold(0, |m, &j| m | 1 << j)).collect();
    let mut best = 0.0f64;
    for s in 0u32..(1 << n) {
        if (0..n).all(|i| s >> i & 1 == 0 || adj[i] & s == 0) {
            let w: f64 = (0..n).filter(|&i| s >> i & 1 == 1).map(|i| g.weights()[i]).sum();
            best = best.max(w);
        }
    }
    best
}

/// All maximal independent sets by scanning every subset.
pub fn exhaustive_mises(g: &WeightedGraph) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut out = Vec::new();
    for s in 0u32..(1 << n) {
        let members: Vec<usize> = (0..n).filter(|&i| s >> i & 1 == 1).collect();
        if g.is_maximal_independent(&members).unwrap() {
            out.push(members);
        }
    }
    out.sort();
    out
}

pub fn weighted_graph(max_n: usize) -> impl Strategy<Value = WeightedGraph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (
            prop::collection::vec(any::<bool>(), pairs),
            prop::collection::vec(0.1f64..10.0, n),
            0.0f64..1.0,
        )
            .prop_map(move |(bits, weights, density)| {
                let mut edges = Vec::new();
                let mut k = 0;
                for j in 1..n {
                    for i in 0..j {
                        // Thin the edge set so sparse and dense graphs both occur.
                        if bits[k] && (k as f64 * 0.618).fract() < density {
                            edges.push((i, j));
                        }
                        k += 1;
                    }
                }
                WeightedGraph::new(n, &edges, &weights).unwrap()
            })
    })
}

pub fn graph_and_state(max_n: usize) -> impl Strategy<Value = (WeightedGraph, Vec<f64>)> {
    weighted_graph(max_n).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), prop::collection::vec(prop_oneof![Just(0.0), 1e-3f64..=1.0, 0.0f64..=1.0], n))
    })
}

pub fn graph_and_positive_state(max_n: usize) -> impl Strategy<Value = (WeightedGraph, Vec<f64>)> {
    weighted_graph(max_n).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), prop::collection::vec(1e-3f64..=1.0, n))
    })
}
