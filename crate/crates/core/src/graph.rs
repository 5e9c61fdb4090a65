//! Immutable vertex-weighted graphs and independent-set predicates.

use std::collections::VecDeque;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("vertex index {index} out of range for graph with {n} vertices")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("weight of vertex {index} must be positive and finite, got {value}")]
    InvalidWeight { index: usize, value: f64 },
    #[error("graph order {0} exceeds the supported maximum of {1}")]
    TooLarge(usize, usize),
}

/// Undirected simple graph with positive vertex weights, stored as CSR.
///
/// Neighbor lists are sorted ascending and symmetric. `sqrt_weights[i]` caches
/// `weights[i].sqrt()`, the per-vertex bias of the weighted dynamics.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    weights: Vec<f64>,
    sqrt_weights: Vec<f64>,
}

impl WeightedGraph {
    /// Validates and builds a graph. Duplicate and reversed edges are merged.
    pub fn new(n: usize, edges: &[(usize, usize)], weights: &[f64]) -> Result<Self, GraphError> {
        if weights.len() != n {
            return Err(GraphError::WeightCount {
                expected: n,
                got: weights.len(),
            });
        }
        for (index, &value) in weights.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(GraphError::InvalidWeight { index, value });
            }
        }
        let mut lists: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(u, v) in edges {
            for index in [u, v] {
                if index >= n {
                    return Err(GraphError::IndexOutOfRange { index, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            lists[u].push(v);
            lists[v].push(u);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::with_capacity(2 * edges.len());
        offsets.push(0);
        for mut list in lists {
            list.sort_unstable();
            list.dedup();
            neighbors.extend(list);
            offsets.push(neighbors.len());
        }
        Ok(Self {
            offsets,
            neighbors,
            sqrt_weights: weights.iter().map(|w| w.sqrt()).collect(),
            weights: weights.to_vec(),
        })
    }

    /// Same topology as `graph`, with the given weights.
    pub fn from_simple(graph: &SimpleGraph, weights: &[f64]) -> Result<Self, GraphError> {
        Self::new(graph.n(), &graph.edges(), weights)
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sqrt_weights(&self) -> &[f64] {
        &self.sqrt_weights
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && v < self.n() && self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n())
            .flat_map(|u| {
                self.neighbors(u)
                    .iter()
                    .filter(move |&&v| v > u)
                    .map(move |&v| (u, v))
            })
            .collect()
    }

    /// Vertex sets of the connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut comp = Vec::new();
            while let Some(u) = queue.pop_front() {
                comp.push(u);
                for &v in self.neighbors(u) {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Subgraph induced by `vertices` (renumbered in the given order).
    pub fn induced(&self, vertices: &[usize]) -> Result<Self, GraphError> {
        let mut position = vec![usize::MAX; self.n()];
        for (k, &v) in vertices.iter().enumerate() {
            self.check_index(v)?;
            position[v] = k;
        }
        let mut edges = Vec::new();
        for (k, &u) in vertices.iter().enumerate() {
            for &v in self.neighbors(u) {
                let p = position[v];
                if p != usize::MAX && k < p {
                    edges.push((k, p));
                }
            }
        }
        let weights: Vec<f64> = vertices.iter().map(|&v| self.weights[v]).collect();
        Self::new(vertices.len(), &edges, &weights)
    }

    fn check_index(&self, index: usize) -> Result<(), GraphError> {
        if index < self.n() {
            Ok(())
        } else {
            Err(GraphError::IndexOutOfRange { index, n: self.n() })
        }
    }

    fn membership(&self, set: &[usize]) -> Result<Vec<bool>, GraphError> {
        let mut member = vec![false; self.n()];
        for &i in set {
            self.check_index(i)?;
            member[i] = true;
        }
        Ok(member)
    }

    /// True iff no edge joins two vertices of `set`.
    pub fn is_independent(&self, set: &[usize]) -> Result<bool, GraphError> {
        let member = self.membership(set)?;
        Ok(independent_mask(self, &member))
    }

    /// True iff `set` is independent and every other vertex has a neighbor in it.
    pub fn is_maximal_independent(&self, set: &[usize]) -> Result<bool, GraphError> {
        let member = self.membership(set)?;
        Ok(independent_mask(self, &member) && dominating_mask(self, &member))
    }

    /// Total weight of `set`; duplicates in `set` are counted once.
    pub fn set_weight(&self, set: &[usize]) -> Result<f64, GraphError> {
        let member = self.membership(set)?;
        Ok(member
            .iter()
            .zip(&self.weights)
            .filter(|(m, _)| **m)
            .map(|(_, w)| w)
            .sum())
    }
}

fn independent_mask(g: &WeightedGraph, member: &[bool]) -> bool {
    (0..g.n())
        .filter(|&i| member[i])
        .all(|i| g.neighbors(i).iter().all(|&j| !member[j]))
}

fn dominating_mask(g: &WeightedGraph, member: &[bool]) -> bool {
    (0..g.n())
        .filter(|&i| !member[i])
        .all(|i| g.neighbors(i).iter().any(|&j| member[j]))
}

/// A vertex subset together with its weight and independence flags.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MisSolution {
    pub members: Vec<usize>,
    pub weight: f64,
    pub independent: bool,
    pub maximal: bool,
}

impl MisSolution {
    /// Evaluates `members` on `g`. Members are sorted and deduplicated.
    pub fn evaluate(g: &WeightedGraph, members: &[usize]) -> Result<Self, GraphError> {
        let mut members = members.to_vec();
        members.sort_unstable();
        members.dedup();
        let member = g.membership(&members)?;
        let independent = independent_mask(g, &member);
        let maximal = independent && dominating_mask(g, &member);
        Ok(Self {
            weight: members.iter().map(|&i| g.weights()[i]).sum(),
            members,
            independent,
            maximal,
        })
    }

    /// Indicator vector of the members on `n` vertices.
    pub fn indicator(&self, n: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        for &i in &self.members {
            x[i] = 1.0;
        }
        x
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }
}

impl fmt::Display for MisSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.members.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// Maximum order of a [`SimpleGraph`] (one 64-bit row per vertex).
pub const SIMPLE_GRAPH_MAX_N: usize = 64;

/// Small unweighted simple graph as bitset rows; the carrier for graph6 and enumeration.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimpleGraph {
    rows: Vec<u64>,
}

impl SimpleGraph {
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        if n > SIMPLE_GRAPH_MAX_N {
            return Err(GraphError::TooLarge(n, SIMPLE_GRAPH_MAX_N));
        }
        Ok(Self { rows: vec![0; n] })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Self::empty(n)?;
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Result<Self, GraphError> {
        let mut g = Self::empty(n)?;
        for v in 1..n {
            for u in 0..v {
                g.add_edge(u, v)?;
            }
        }
        Ok(g)
    }

    pub fn path(n: usize) -> Result<Self, GraphError> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, &edges)
    }

    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        if n > 2 {
            edges.push((n - 1, 0));
        }
        Self::from_edges(n, &edges)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        let n = self.n();
        for index in [u, v] {
            if index >= n {
                return Err(GraphError::IndexOutOfRange { index, n });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        self.rows[u] |= 1 << v;
        self.rows[v] |= 1 << u;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u] >> v & 1 == 1
    }

    /// Neighbor bitset of `u`.
    #[inline]
    pub fn row(&self, u: usize) -> u64 {
        self.rows[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.rows[u].count_ones() as usize
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        (0..n)
            .flat_map(|u| ((u + 1)..n).filter(move |&v| self.has_edge(u, v)).map(move |v| (u, v)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum::<usize>() / 2
    }

    /// Common degree if every vertex has the same degree.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.rows.first().map(|_| self.degree(0))?;
        (0..self.n()).all(|u| self.degree(u) == d).then_some(d)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n();
        if n == 0 {
            return false;
        }
        let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut seen = 1u64;
        let mut frontier = 1u64;
        while frontier != 0 {
            let mut next = 0u64;
            let mut f = frontier;
            while f != 0 {
                let u = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= self.rows[u];
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen == all
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3(w: [f64; 3]) -> WeightedGraph {
        WeightedGraph::new(3, &[(0, 1), (1, 2)], &w).unwrap()
    }

    #[test]
    fn builds_k2_and_path() {
        let k2 = WeightedGraph::new(2, &[(0, 1)], &[1.0, 1.0]).unwrap();
        assert_eq!(k2.edge_count(), 1);
        assert_eq!(k2.neighbors(0), &[1]);
        let p = p3([1.0, 3.0, 1.0]);
        assert_eq!(p.neighbors(1), &[0, 2]);
        assert_eq!(p.sqrt_weights()[1], 3f64.sqrt());
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            WeightedGraph::new(2, &[(0, 0)], &[1.0, 1.0]),
            Err(GraphError::SelfLoop(0))
        );
        assert!(matches!(
            WeightedGraph::new(2, &[(0, 2)], &[1.0, 1.0]),
            Err(GraphError::IndexOutOfRange { index: 2, n: 2 })
        ));
        assert!(WeightedGraph::new(2, &[], &[1.0]).is_err());
        assert!(WeightedGraph::new(2, &[], &[1.0, 0.0]).is_err());
        assert!(WeightedGraph::new(2, &[], &[1.0, f64::NAN]).is_err());
        assert!(WeightedGraph::new(2, &[], &[-1.0, 1.0]).is_err());
    }

    #[test]
    fn duplicate_and_reversed_edges_merge() {
        let g = WeightedGraph::new(3, &[(0, 1), (1, 0), (0, 1), (2, 1)], &[1.0; 3]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edges(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn independence_predicates() {
        let k2 = WeightedGraph::new(2, &[(0, 1)], &[1.0, 1.0]).unwrap();
        assert!(k2.is_independent(&[0]).unwrap());
        assert!(!k2.is_independent(&[0, 1]).unwrap());
        let p = p3([1.0, 3.0, 1.0]);
        assert!(p.is_independent(&[0, 2]).unwrap());
        assert!(p.is_maximal_independent(&[1]).unwrap());
        assert!(!p.is_maximal_independent(&[0]).unwrap());
        let edgeless = WeightedGraph::new(3, &[], &[1.0; 3]).unwrap();
        assert!(edgeless.is_maximal_independent(&[0, 1, 2]).unwrap());
        assert!(p.is_independent(&[3]).is_err());
    }

    #[test]
    fn set_weights() {
        let p = p3([1.0, 3.0, 1.0]);
        assert_eq!(p.set_weight(&[]).unwrap(), 0.0);
        assert_eq!(p.set_weight(&[1]).unwrap(), 3.0);
        assert_eq!(p.set_weight(&[0, 2]).unwrap(), 2.0);
        assert!(p.set_weight(&[7]).is_err());
    }

    #[test]
    fn mis_solution_flags() {
        let p = p3([1.0, 3.0, 1.0]);
        let s = MisSolution::evaluate(&p, &[2, 0]).unwrap();
        assert_eq!(s.members, vec![0, 2]);
        assert!(s.independent && s.maximal);
        assert_eq!(s.weight, 2.0);
        let s = MisSolution::evaluate(&p, &[0, 1]).unwrap();
        assert!(!s.independent && !s.maximal);
        assert_eq!(s.to_string(), "{0,1}");
    }

    #[test]
    fn components_and_induced() {
        let g = WeightedGraph::new(5, &[(0, 3), (1, 2)], &[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(g.components(), vec![vec![0, 3], vec![1, 2], vec![4]]);
        let h = g.induced(&[1, 2]).unwrap();
        assert_eq!(h.edges(), vec![(0, 1)]);
        assert_eq!(h.weights(), &[2.0, 3.0]);
    }

    #[test]
    fn simple_graph_basics() {
        let c4 = SimpleGraph::cycle(4).unwrap();
        assert_eq!(c4.regular_degree(), Some(2));
        assert!(c4.is_connected());
        let p3 = SimpleGraph::path(3).unwrap();
        assert_eq!(p3.regular_degree(), None);
        let two = SimpleGraph::empty(2).unwrap();
        assert!(!two.is_connected());
        assert!(SimpleGraph::empty(1).unwrap().is_connected());
        assert_eq!(SimpleGraph::complete(4).unwrap().edge_count(), 6);
    }

    #[test]
    fn adjacency_is_symmetric() {
        let g = WeightedGraph::new(6, &[(0, 1), (2, 1), (3, 4), (5, 0), (4, 1)], &[1.0; 6]).unwrap();
        let mut forward = 0;
        let mut backward = 0;
        for i in 0..g.n() {
            assert!(!g.neighbors(i).contains(&i));
            for &j in g.neighbors(i) {
                forward += 1;
                if g.neighbors(j).contains(&i) {
                    backward += 1;
                }
            }
        }
        assert_eq!(forward, backward);
    }
}
