//! Non-isomorphic graph enumeration and the atomic-graph census.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::analysis::{atom_spectrum, AnalysisError, SpectrumKind};
use crate::graph::{GraphError, SimpleGraph};

/// Largest order the exhaustive enumeration accepts.
pub const ENUMERATION_MAX_N: usize = 7;
/// Largest order with a 64-bit canonical code.
pub const CANONICAL_MAX_N: usize = 11;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnumerationError {
    #[error("order {n} exceeds the supported maximum of {max}")]
    TooLarge { n: usize, max: usize },
    #[error("census stream mixes orders {expected} and {got}")]
    MixedOrders { expected: usize, got: usize },
    #[error("census stream is empty")]
    EmptyStream,
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[inline]
fn pair_index(i: usize, j: usize) -> usize {
    j * (j - 1) / 2 + i
}

/// Upper-triangle bitstring in column-major pair order, first pair most significant.
pub fn adjacency_code(g: &SimpleGraph) -> Result<u64, EnumerationError> {
    let n = g.n();
    if n > CANONICAL_MAX_N {
        return Err(EnumerationError::TooLarge { n, max: CANONICAL_MAX_N });
    }
    let len = n * n.saturating_sub(1) / 2;
    let mut code = 0u64;
    for (i, j) in g.edges() {
        code |= 1 << (len - 1 - pair_index(i, j));
    }
    Ok(code)
}

/// Inverse of [`adjacency_code`].
pub fn graph_from_code(n: usize, code: u64) -> Result<SimpleGraph, EnumerationError> {
    if n > CANONICAL_MAX_N {
        return Err(EnumerationError::TooLarge { n, max: CANONICAL_MAX_N });
    }
    let len = n * n.saturating_sub(1) / 2;
    let mut g = SimpleGraph::empty(n)?;
    for j in 1..n {
        for i in 0..j {
            if code >> (len - 1 - pair_index(i, j)) & 1 == 1 {
                g.add_edge(i, j)?;
            }
        }
    }
    Ok(g)
}

/// Lexicographically minimal adjacency code over all vertex relabelings.
///
/// Positions are filled in order; placing position `j` fixes exactly the next
/// `j` bits of the code, so partial labelings whose prefix already exceeds the
/// best complete code are pruned.
pub fn canonical_code(g: &SimpleGraph) -> Result<u64, EnumerationError> {
    let n = g.n();
    let start = adjacency_code(g)?;
    if n <= 1 {
        return Ok(start);
    }
    let len = n * (n - 1) / 2;
    let mut search = CanonicalSearch {
        g,
        len,
        best: start,
        perm: Vec::with_capacity(n),
        used: 0,
    };
    search.extend(0, 0, false);
    Ok(search.best)
}

struct CanonicalSearch<'a> {
    g: &'a SimpleGraph,
    len: usize,
    best: u64,
    perm: Vec<usize>,
    used: u64,
}

impl CanonicalSearch<'_> {
    fn extend(&mut self, prefix: u64, bits: usize, below: bool) {
        let n = self.g.n();
        let j = self.perm.len();
        if j == n {
            if prefix < self.best {
                self.best = prefix;
            }
            return;
        }
        for v in 0..n {
            if self.used >> v & 1 == 1 {
                continue;
            }
            let mut p = prefix;
            for &u in &self.perm {
                p = p << 1 | self.g.has_edge(u, v) as u64;
            }
            let nbits = bits + j;
            let mut still_below = below;
            if !below && nbits > 0 {
                let best_prefix = self.best >> (self.len - nbits);
                if p > best_prefix {
                    continue;
                }
                still_below = p < best_prefix;
            }
            self.perm.push(v);
            self.used |= 1 << v;
            self.extend(p, nbits, still_below);
            self.used &= !(1 << v);
            self.perm.pop();
        }
    }
}

/// Canonical representative of the isomorphism class of `g`.
pub fn canonical_form(g: &SimpleGraph) -> Result<SimpleGraph, EnumerationError> {
    graph_from_code(g.n(), canonical_code(g)?)
}

/// All graphs of order `n` up to isomorphism, as canonical codes in ascending order.
pub fn all_graph_codes(n: usize) -> Result<Vec<u64>, EnumerationError> {
    if n > ENUMERATION_MAX_N {
        return Err(EnumerationError::TooLarge { n, max: ENUMERATION_MAX_N });
    }
    let mut level = vec![0u64];
    for m in 1..n {
        // Extend every order-m graph by a vertex adjacent to each subset.
        let parents: Vec<SimpleGraph> = level
            .iter()
            .map(|&c| graph_from_code(m, c))
            .collect::<Result<_, _>>()?;
        let children: Vec<u64> = parents
            .par_iter()
            .flat_map_iter(|parent| {
                (0u64..1 << m).map(move |subset| {
                    let mut child = SimpleGraph::empty(m + 1).expect("order within bounds");
                    for (u, v) in parent.edges() {
                        child.add_edge(u, v).expect("valid edge");
                    }
                    for u in 0..m {
                        if subset >> u & 1 == 1 {
                            child.add_edge(u, m).expect("valid edge");
                        }
                    }
                    canonical_code(&child).expect("order within bounds")
                })
            })
            .collect();
        level = children.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    }
    if n == 0 {
        level.clear();
    }
    Ok(level)
}

/// Connected graphs of order `n` up to isomorphism, in canonical-code order.
pub fn connected_graphs(n: usize) -> Result<Vec<SimpleGraph>, EnumerationError> {
    let codes = all_graph_codes(n)?;
    let mut out = Vec::new();
    for c in codes {
        let g = graph_from_code(n, c)?;
        if g.is_connected() {
            out.push(g);
        }
    }
    Ok(out)
}

/// Connected graphs of every order `1..=max_n`.
pub fn connected_graphs_upto(max_n: usize) -> Result<Vec<Vec<SimpleGraph>>, EnumerationError> {
    (1..=max_n).map(connected_graphs).collect()
}

/// Per-order tally of atomic spectra.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CensusRow {
    pub n: usize,
    pub connected: usize,
    pub irregular_discrete: usize,
    pub irregular_continuous: usize,
    pub regular_discrete: usize,
    pub regular_continuous: usize,
    pub borderline: usize,
    pub skipped_disconnected: usize,
}

impl CensusRow {
    pub fn atomic(&self) -> usize {
        self.irregular_discrete + self.irregular_continuous + self.regular_discrete + self.regular_continuous
    }

    fn single(n: usize, kind: SpectrumKind, regular: bool) -> Self {
        let mut row = CensusRow { n, connected: 1, ..Default::default() };
        match (kind, regular) {
            (SpectrumKind::Discrete, false) => row.irregular_discrete = 1,
            (SpectrumKind::Continuous, false) => row.irregular_continuous = 1,
            (SpectrumKind::Discrete, true) => row.regular_discrete = 1,
            (SpectrumKind::Continuous, true) => row.regular_continuous = 1,
            (SpectrumKind::Borderline, _) => row.borderline = 1,
            (SpectrumKind::Empty, _) => {}
        }
        row
    }

    fn merge(self, other: Self) -> Self {
        CensusRow {
            n: self.n.max(other.n),
            connected: self.connected + other.connected,
            irregular_discrete: self.irregular_discrete + other.irregular_discrete,
            irregular_continuous: self.irregular_continuous + other.irregular_continuous,
            regular_discrete: self.regular_discrete + other.regular_discrete,
            regular_continuous: self.regular_continuous + other.regular_continuous,
            borderline: self.borderline + other.borderline,
            skipped_disconnected: self.skipped_disconnected + other.skipped_disconnected,
        }
    }
}

/// Census over a stream of same-order graphs; disconnected inputs are counted and skipped.
pub fn census_from_stream<I>(graphs: I) -> Result<CensusRow, EnumerationError>
where
    I: IntoIterator<Item = SimpleGraph>,
{
    let graphs: Vec<SimpleGraph> = graphs.into_iter().collect();
    let n = graphs.first().ok_or(EnumerationError::EmptyStream)?.n();
    if let Some(g) = graphs.iter().find(|g| g.n() != n) {
        return Err(EnumerationError::MixedOrders { expected: n, got: g.n() });
    }
    graphs
        .par_iter()
        .map(|g| {
            if !g.is_connected() {
                return Ok(CensusRow { n, skipped_disconnected: 1, ..Default::default() });
            }
            let c = atom_spectrum(g)?;
            Ok(CensusRow::single(n, c.kind, c.regular))
        })
        .try_reduce(|| CensusRow { n, ..Default::default() }, |a, b| Ok(a.merge(b)))
}

/// Census rows for every order `1..=max_n`.
pub fn census(max_n: usize) -> Result<Vec<CensusRow>, EnumerationError> {
    connected_graphs_upto(max_n)?
        .into_iter()
        .map(census_from_stream)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn code_round_trip() {
        let g = SimpleGraph::from_edges(4, &[(0, 1), (1, 3), (2, 3)]).unwrap();
        let code = adjacency_code(&g).unwrap();
        assert_eq!(graph_from_code(4, code).unwrap(), g);
        // (0,1) is the most significant of six pairs.
        assert_eq!(adjacency_code(&SimpleGraph::from_edges(4, &[(0, 1)]).unwrap()).unwrap(), 0b100000);
        assert_eq!(adjacency_code(&SimpleGraph::from_edges(4, &[(2, 3)]).unwrap()).unwrap(), 0b000001);
    }

    #[test]
    fn canonical_form_is_label_invariant() {
        let a = SimpleGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let b = SimpleGraph::from_edges(4, &[(2, 0), (0, 3), (3, 1)]).unwrap();
        assert_eq!(canonical_code(&a).unwrap(), canonical_code(&b).unwrap());
        let star = SimpleGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_ne!(canonical_code(&a).unwrap(), canonical_code(&star).unwrap());
    }

    #[test]
    fn small_counts() {
        let all: Vec<_> = (1..=5).map(|n| all_graph_codes(n).unwrap().len()).collect();
        assert_eq!(all, vec![1, 2, 4, 11, 34]);
        let conn: Vec<_> = (1..=5).map(|n| connected_graphs(n).unwrap().len()).collect();
        assert_eq!(conn, vec![1, 1, 2, 6, 21]);
    }

    #[test]
    fn small_census() {
        let rows = census(4).unwrap();
        assert_eq!(rows[0].regular_discrete, 1);
        assert_eq!(rows[1].regular_continuous, 1);
        assert_eq!(rows[2].regular_continuous, 1);
        assert_eq!((rows[3].regular_discrete, rows[3].regular_continuous, rows[3].atomic()), (1, 1, 2));
    }

    #[test]
    fn stream_validation() {
        let mixed = vec![SimpleGraph::complete(2).unwrap(), SimpleGraph::complete(3).unwrap()];
        assert_eq!(census_from_stream(mixed), Err(EnumerationError::MixedOrders { expected: 2, got: 3 }));
        assert_eq!(census_from_stream(Vec::new()), Err(EnumerationError::EmptyStream));
        let row = census_from_stream(vec![SimpleGraph::empty(2).unwrap(), SimpleGraph::complete(2).unwrap()]).unwrap();
        assert_eq!((row.connected, row.skipped_disconnected, row.atomic()), (1, 1, 1));
    }

    #[test]
    fn too_large() {
        assert!(matches!(all_graph_codes(8), Err(EnumerationError::TooLarge { .. })));
    }
}
