use minilp::{ComparisonOp, OptimizationDirection, Problem};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::graph::SimpleGraph;

use super::AnalysisError;

/// LP optima within this distance of zero are reported as [`SpectrumKind::Borderline`].
pub const ATOM_LP_MARGIN: f64 = 1e-9;
/// Box on the LP variables; the solver misbehaves on fully free columns.
const LP_BOX: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpectrumKind {
    /// `(A + I)x = 1` has no strictly positive solution.
    Empty,
    /// A unique, strictly positive solution.
    Discrete,
    /// A positive solution inside a continuum of solutions.
    Continuous,
    /// The positivity test landed inside the numerical margin; undecided.
    Borderline,
}

impl SpectrumKind {
    pub fn is_atomic(self) -> bool {
        matches!(self, SpectrumKind::Discrete | SpectrumKind::Continuous)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumClassification {
    pub kind: SpectrumKind,
    /// A strictly positive exact solution when the graph is atomic.
    pub witness: Option<Vec<BigRational>>,
    /// Dimension of the kernel of `A + I`.
    pub nullity: usize,
    pub regular: bool,
    /// Optimum of the positivity LP, when it was needed.
    pub lp_optimum: Option<f64>,
}

impl SpectrumClassification {
    pub fn witness_f64(&self) -> Option<Vec<f64>> {
        self.witness
            .as_ref()
            .map(|w| w.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect())
    }
}

/// Classifies a connected graph by the positive solutions of `(A + I)x = 1`.
///
/// Linear algebra is exact. The singular, irregular case whose canonical
/// particular solution is not positive goes through a floating-point LP; a
/// positive answer is re-checked exactly on the rationalized witness, a
/// non-positive one is confirmed by an exact dual certificate.
pub fn atom_spectrum(g: &SimpleGraph) -> Result<SpectrumClassification, AnalysisError> {
    let n = g.n();
    if n == 0 {
        return Err(AnalysisError::EmptyGraph);
    }
    if !g.is_connected() {
        return Err(AnalysisError::Disconnected);
    }
    let regular = g.regular_degree();
    let one = BigRational::one();
    let zero = BigRational::zero();
    let mut rows: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..=n)
                .map(|j| if j == n || i == j || g.has_edge(i, j) { one.clone() } else { zero.clone() })
                .collect()
        })
        .collect();
    let closed: Vec<Vec<BigRational>> = rows.iter().map(|r| r[..n].to_vec()).collect();
    let pivots = rref(&mut rows, n);
    let rank = pivots.len();
    let nullity = n - rank;
    let classification = |kind, witness, lp_optimum| SpectrumClassification {
        kind,
        witness,
        nullity,
        regular: regular.is_some(),
        lp_optimum,
    };

    if rows[rank..].iter().any(|row| !row[n].is_zero()) {
        return Ok(classification(SpectrumKind::Empty, None, None));
    }

    let mut particular = vec![zero.clone(); n];
    for (r, &p) in pivots.iter().enumerate() {
        particular[p] = rows[r][n].clone();
    }
    if nullity == 0 {
        return Ok(if all_positive(&particular) {
            classification(SpectrumKind::Discrete, Some(particular), None)
        } else {
            classification(SpectrumKind::Empty, None, None)
        });
    }
    if let Some(d) = regular {
        let uniform = BigRational::new(BigInt::one(), BigInt::from(d + 1));
        return Ok(classification(SpectrumKind::Continuous, Some(vec![uniform; n]), None));
    }
    if all_positive(&particular) {
        return Ok(classification(SpectrumKind::Continuous, Some(particular), None));
    }

    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let basis: Vec<Vec<BigRational>> = (0..n)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut z = vec![zero.clone(); n];
            z[f] = one.clone();
            for (r, &p) in pivots.iter().enumerate() {
                z[p] = -rows[r][f].clone();
            }
            z
        })
        .collect();

    // Coordinates the kernel never moves are decided exactly.
    let pinned_nonpositive = (0..n).any(|i| basis.iter().all(|z| z[i].is_zero()) && !particular[i].is_positive());
    if pinned_nonpositive {
        return Ok(classification(SpectrumKind::Empty, None, None));
    }

    let (optimum, coeffs) = positivity_lp(&particular, &basis)?;
    if optimum <= ATOM_LP_MARGIN {
        let kind = if optimum < -ATOM_LP_MARGIN || emptiness_certified(&closed)? {
            SpectrumKind::Empty
        } else {
            SpectrumKind::Borderline
        };
        return Ok(classification(kind, None, Some(optimum)));
    }
    let mut witness = particular;
    for (c, z) in coeffs.iter().zip(&basis) {
        let c = BigRational::from_float(*c).ok_or_else(|| AnalysisError::LinearProgram("non-finite coefficient".into()))?;
        for (w, zi) in witness.iter_mut().zip(z) {
            *w += &c * zi;
        }
    }
    if all_positive(&witness) {
        Ok(classification(SpectrumKind::Continuous, Some(witness), Some(optimum)))
    } else {
        Ok(classification(SpectrumKind::Borderline, None, Some(optimum)))
    }
}

fn all_positive(x: &[BigRational]) -> bool {
    x.iter().all(|q| q.is_positive())
}

/// Reduced row echelon form over the first `cols` columns; returns pivot columns.
fn rref(rows: &mut [Vec<BigRational>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v -= &factor * pv;
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

/// Maximizes `t` subject to `x0 + Σ c_k z_k ≥ t`, `t ≤ 1`, `c` free.
fn positivity_lp(x0: &[BigRational], basis: &[Vec<BigRational>]) -> Result<(f64, Vec<f64>), AnalysisError> {
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let coeffs: Vec<_> = basis
        .iter()
        .map(|_| problem.add_var(0.0, (-LP_BOX, LP_BOX)))
        .collect();
    let t = problem.add_var(1.0, (-LP_BOX, 1.0));
    for i in 0..x0.len() {
        let mut expr: Vec<_> = coeffs
            .iter()
            .zip(basis)
            .filter(|(_, z)| !z[i].is_zero())
            .map(|(&var, z)| (var, z[i].to_f64().unwrap_or(0.0)))
            .collect();
        expr.push((t, -1.0));
        let rhs = -x0[i].to_f64().unwrap_or(0.0);
        problem.add_constraint(expr.as_slice(), ComparisonOp::Ge, rhs);
    }
    let solution = problem
        .solve()
        .map_err(|e| AnalysisError::LinearProgram(e.to_string()))?;
    let values = coeffs.iter().map(|&var| solution[var]).collect();
    Ok((solution.objective(), values))
}

/// Searches for an exact certificate that `Mx = 1` has no strictly positive solution:
/// `y` with `My ≥ 0`, `My ≠ 0` and `1ᵀy ≤ 0`. Then `(My)ᵀx = 1ᵀy ≤ 0` for every
/// solution, which rules out `x > 0`.
///
/// The certificate is the dual of the positivity LP. Its floating-point optimum
/// only selects the tight rows; `y` is then recomputed and checked exactly.
fn emptiness_certified(m: &[Vec<BigRational>]) -> Result<bool, AnalysisError> {
    let n = m.len();
    let to_f64 = |q: &BigRational| q.to_f64().unwrap_or(0.0);
    let column_sums: Vec<BigRational> = (0..n).map(|j| m.iter().map(|row| &row[j]).sum()).collect();

    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let y: Vec<_> = (0..n)
        .map(|_| problem.add_var(1.0, (-LP_BOX, LP_BOX)))
        .collect();
    for row in m {
        let expr: Vec<_> = y.iter().zip(row).filter(|(_, a)| !a.is_zero()).map(|(&v, a)| (v, to_f64(a))).collect();
        problem.add_constraint(expr.as_slice(), ComparisonOp::Ge, 0.0);
    }
    let expr: Vec<_> = y.iter().zip(&column_sums).map(|(&v, c)| (v, to_f64(c))).collect();
    problem.add_constraint(expr.as_slice(), ComparisonOp::Eq, 1.0);
    let Ok(solution) = problem.solve() else {
        return Ok(false);
    };
    let y_float: Vec<f64> = y.iter().map(|&v| solution[v]).collect();

    // Exact re-solve on the tight rows plus the normalization row.
    let one = BigRational::one();
    let zero = BigRational::zero();
    let mut system: Vec<Vec<BigRational>> = m
        .iter()
        .filter(|row| {
            let my: f64 = row.iter().zip(&y_float).map(|(a, yj)| to_f64(a) * yj).sum();
            my.abs() <= 1e-7
        })
        .map(|row| row.iter().cloned().chain([zero.clone()]).collect())
        .collect();
    system.push(column_sums.iter().cloned().chain([one]).collect());
    let pivots = rref(&mut system, n);
    if system[pivots.len()..].iter().any(|row| !row[n].is_zero()) {
        return Ok(false);
    }
    let mut y_exact = vec![zero.clone(); n];
    for (r, &p) in pivots.iter().enumerate() {
        y_exact[p] = system[r][n].clone();
    }
    let rounded: Vec<BigRational> = y_float.iter().map(|&v| rationalize(v)).collect();
    Ok(is_certificate(m, &y_exact) || is_certificate(m, &rounded))
}

fn is_certificate(m: &[Vec<BigRational>], y: &[BigRational]) -> bool {
    let my: Vec<BigRational> = m
        .iter()
        .map(|row| row.iter().zip(y).map(|(a, b)| a * b).sum())
        .collect();
    let total: BigRational = y.iter().sum();
    my.iter().all(|v| !v.is_negative()) && my.iter().any(|v| v.is_positive()) && !total.is_positive()
}

/// Closest small-denominator fraction to `x` by continued fractions.
fn rationalize(x: f64) -> BigRational {
    const MAX_DENOMINATOR: i64 = 1 << 20;
    if !x.is_finite() || x.abs() > 1e12 {
        return BigRational::from_float(x).unwrap_or_else(BigRational::zero);
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut r = x;
    loop {
        let a = r.floor();
        let (p2, q2) = (a as i64 * p1 + p0, a as i64 * q1 + q0);
        if q2 > MAX_DENOMINATOR {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = r - a;
        if (p1 as f64 / q1 as f64 - x).abs() <= 1e-12 * x.abs().max(1.0) || frac < 1e-12 {
            break;
        }
        r = 1.0 / frac;
    }
    if q1 == 0 {
        return BigRational::from_float(x).unwrap_or_else(BigRational::zero);
    }
    BigRational::new(BigInt::from(p1), BigInt::from(q1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_witness(g: &SimpleGraph, c: &SpectrumClassification) {
        let w = c.witness.as_ref().unwrap();
        for i in 0..g.n() {
            let mut s = w[i].clone();
            for (j, wj) in w.iter().enumerate() {
                if g.has_edge(i, j) {
                    s += wj;
                }
            }
            assert!(s.is_one(), "row {i} sums to {s}");
            assert!(w[i].is_positive());
        }
    }

    #[test]
    fn small_examples() {
        let k1 = SimpleGraph::empty(1).unwrap();
        let c = atom_spectrum(&k1).unwrap();
        assert_eq!((c.kind, c.nullity, c.regular), (SpectrumKind::Discrete, 0, true));
        check_witness(&k1, &c);

        let k3 = SimpleGraph::complete(3).unwrap();
        let c = atom_spectrum(&k3).unwrap();
        assert_eq!((c.kind, c.nullity), (SpectrumKind::Continuous, 2));
        check_witness(&k3, &c);

        let p3 = SimpleGraph::path(3).unwrap();
        assert_eq!(atom_spectrum(&p3).unwrap().kind, SpectrumKind::Empty);

        let c4 = SimpleGraph::cycle(4).unwrap();
        let c = atom_spectrum(&c4).unwrap();
        assert_eq!(c.kind, SpectrumKind::Discrete);
        assert_eq!(c.witness.as_ref().unwrap()[0], BigRational::new(1.into(), 3.into()));
    }

    #[test]
    fn rejects_disconnected_and_empty() {
        let g = SimpleGraph::empty(2).unwrap();
        assert_eq!(atom_spectrum(&g), Err(AnalysisError::Disconnected));
        assert_eq!(atom_spectrum(&SimpleGraph::empty(0).unwrap()), Err(AnalysisError::EmptyGraph));
    }

    #[test]
    fn irregular_singular_needs_lp() {
        // Two triangles sharing an edge (the diamond) plus a pendant on a tip.
        let g = SimpleGraph::from_edges(5, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (3, 4)]).unwrap();
        let c = atom_spectrum(&g).unwrap();
        if c.kind.is_atomic() {
            check_witness(&g, &c);
        }
        // K₄ minus an edge: the two middle rows coincide and force x_3 = 0.
        let diamond = SimpleGraph::from_edges(4, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]).unwrap();
        let c = atom_spectrum(&diamond).unwrap();
        assert_eq!(c.nullity, 1);
        assert_eq!(c.kind, SpectrumKind::Empty);
    }

    #[test]
    fn rationalize_recovers_small_fractions() {
        assert_eq!(rationalize(0.5), BigRational::new(1.into(), 2.into()));
        assert_eq!(rationalize(-1.0 / 3.0 + 1e-15), BigRational::new((-1).into(), 3.into()));
        assert_eq!(rationalize(2.0), BigRational::from_integer(2.into()));
    }

    #[test]
    fn forced_zero_pair_is_certified_empty() {
        // Vertex 4 sees everything; two triangles through it force x_1 + x_2 = 0.
        let g = SimpleGraph::from_edges(5, &[(0, 3), (0, 4), (1, 2), (1, 4), (2, 4), (3, 4)]).unwrap();
        assert_eq!(atom_spectrum(&g).unwrap().kind, SpectrumKind::Empty);
    }

    #[test]
    fn rref_rank() {
        let q = |v: i64| BigRational::from_integer(v.into());
        let mut m = vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)], vec![q(0), q(1), q(1)]];
        let p = rref(&mut m, 3);
        assert_eq!(p, vec![0, 1]);
    }
}
