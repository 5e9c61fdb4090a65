//! Energy, weighted mass and the replicator (simplex) view of a state.

use crate::graph::WeightedGraph;

use super::DynamicsError;

/// Quadratic energy of the weighted dynamics, evaluated in the weighted
/// coordinates `y = √w ⊙ x`:
///
/// `½ yᵀ(I + γA)y − Σ √w_i y_i`
///
/// This is the majorized objective the update descends; it coincides with
/// `½ xᵀ(I + γ diag(v)⁻¹ A diag(v))x − Σ w_i x_i` whenever weights are uniform.
pub fn energy(g: &WeightedGraph, x: &[f64], gamma: f64) -> f64 {
    let v = g.sqrt_weights();
    let mut quad = 0.0;
    let mut linear = 0.0;
    for i in 0..g.n() {
        let yi = v[i] * x[i];
        if yi == 0.0 {
            continue;
        }
        let ny: f64 = g.neighbors(i).iter().map(|&j| v[j] * x[j]).sum();
        quad += yi * (yi + gamma * ny);
        linear += v[i] * yi;
    }
    0.5 * quad - linear
}

/// Relaxed MWIS objective `Σ w_i x_i`.
pub fn weighted_mass(g: &WeightedGraph, x: &[f64]) -> f64 {
    g.weights().iter().zip(x).map(|(w, xi)| w * xi).sum()
}

/// Simplex state `p_i = w_i x_i / Σ_j w_j x_j`.
pub fn simplex_state(g: &WeightedGraph, x: &[f64]) -> Result<Vec<f64>, DynamicsError> {
    let mass = weighted_mass(g, x);
    if !(mass > 0.0) {
        return Err(DynamicsError::ZeroMass);
    }
    Ok(g.weights().iter().zip(x).map(|(w, xi)| w * xi / mass).collect())
}

/// Replicator fitness `f_i = v_i / ((I+γA)(p ⊘ v))_i` and its mean `Σ p_i f_i`.
pub fn fitness(g: &WeightedGraph, p: &[f64], gamma: f64) -> Result<(Vec<f64>, f64), DynamicsError> {
    let v = g.sqrt_weights();
    let q: Vec<f64> = p.iter().zip(v).map(|(pi, vi)| pi / vi).collect();
    let mut f = Vec::with_capacity(g.n());
    let mut mean = 0.0;
    for i in 0..g.n() {
        let demand = q[i] + gamma * g.neighbors(i).iter().map(|&j| q[j]).sum::<f64>();
        if !(demand > 0.0) {
            return Err(DynamicsError::ZeroDenominator(i));
        }
        let fi = v[i] / demand;
        mean += p[i] * fi;
        f.push(fi);
    }
    Ok((f, mean))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k2(w: [f64; 2]) -> WeightedGraph {
        WeightedGraph::new(2, &[(0, 1)], &w).unwrap()
    }

    #[test]
    fn energy_values() {
        let g = k2([1.0, 1.0]);
        assert_eq!(energy(&g, &[0.0, 0.0], 1.3), 0.0);
        assert_eq!(energy(&g, &[1.0, 0.0], 7.0), -0.5);
        assert_eq!(energy(&g, &[1.0, 1.0], 1.0), 0.0);
    }

    #[test]
    fn energy_matches_dense_weighted_form() {
        // ½ yᵀ(I+γA)y − vᵀy on a weighted triangle-with-tail, expanded by hand.
        let g = WeightedGraph::new(4, &[(0, 1), (1, 2), (0, 2), (2, 3)], &[4.0, 1.0, 9.0, 2.0]).unwrap();
        let x = [0.3, 0.5, 0.2, 0.9];
        let gamma = 1.4;
        let v = [2.0, 1.0, 3.0, 2f64.sqrt()];
        let y: Vec<f64> = x.iter().zip(v).map(|(a, b)| a * b).collect();
        let adj = [[0., 1., 1., 0.], [1., 0., 1., 0.], [1., 1., 0., 1.], [0., 0., 1., 0.]];
        let mut expected = 0.0;
        for i in 0..4 {
            expected += 0.5 * y[i] * y[i] - v[i] * y[i];
            for j in 0..4 {
                expected += 0.5 * gamma * adj[i][j] * y[i] * y[j];
            }
        }
        assert!((energy(&g, &x, gamma) - expected).abs() < 1e-14);
    }

    #[test]
    fn mass_values() {
        let g = k2([4.0, 1.0]);
        assert_eq!(weighted_mass(&g, &[0.0, 0.0]), 0.0);
        assert_eq!(weighted_mass(&g, &[0.5, 0.5]), 2.5);
        assert_eq!(weighted_mass(&g, &[1.0, 0.0]), 4.0);
    }

    #[test]
    fn simplex_values() {
        assert_eq!(simplex_state(&k2([1.0, 1.0]), &[1.0, 1.0]).unwrap(), vec![0.5, 0.5]);
        let p = simplex_state(&k2([4.0, 1.0]), &[1.0, 1.0]).unwrap();
        assert!((p[0] - 0.8).abs() < 1e-15 && (p[1] - 0.2).abs() < 1e-15);
        assert_eq!(simplex_state(&k2([4.0, 1.0]), &[0.0, 0.3]).unwrap(), vec![0.0, 1.0]);
        assert_eq!(simplex_state(&k2([4.0, 1.0]), &[0.0, 0.0]), Err(DynamicsError::ZeroMass));
    }

    #[test]
    fn fitness_values() {
        let k4 = WeightedGraph::new(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], &[1.0; 4]).unwrap();
        let (f, fbar) = fitness(&k4, &[0.25; 4], 1.0).unwrap();
        assert!(f.iter().all(|fi| (fi - 1.0).abs() < 1e-15));
        assert!((fbar - 1.0).abs() < 1e-15);

        let (f, fbar) = fitness(&k2([1.0, 1.0]), &[0.75, 0.25], 1.0).unwrap();
        assert_eq!(f, vec![1.0, 1.0]);
        assert_eq!(fbar, 1.0);

        let single = WeightedGraph::new(1, &[], &[3.0]).unwrap();
        let (f, fbar) = fitness(&single, &[1.0], 1.5).unwrap();
        assert!((f[0] - 3.0).abs() < 1e-15 && (fbar - 3.0).abs() < 1e-15);

        let edgeless = WeightedGraph::new(2, &[], &[1.0, 1.0]).unwrap();
        assert_eq!(
            fitness(&edgeless, &[1.0, 0.0], 1.0),
            Err(DynamicsError::ZeroDenominator(1))
        );
    }
}
