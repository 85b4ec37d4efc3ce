//! Gauss–Legendre quadrature, used as an independent oracle for the
//! integral forms of the L2 coefficients.

use nalgebra::{DMatrix, SymmetricEigen};

/// Nodes and weights of an `n`-point Gauss–Legendre rule on `[a, b]`.
///
/// Computed by the Golub–Welsch algorithm: the nodes are the eigenvalues of
/// the symmetric tridiagonal Jacobi matrix of the Legendre recurrence and the
/// weights follow from the first eigenvector components.
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize, a: f64, b: f64) -> Self {
        assert!(n >= 1, "quadrature order must be at least 1");
        let mut jac = DMatrix::<f64>::zeros(n, n);
        for k in 1..n {
            let kf = k as f64;
            // Off-diagonal entries beta_k = k / sqrt(4k^2 - 1) for Legendre.
            let beta = kf / (4.0 * kf * kf - 1.0).sqrt();
            jac[(k, k - 1)] = beta;
            jac[(k - 1, k)] = beta;
        }
        let eig = SymmetricEigen::new(jac);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let x = eig.eigenvalues[i];
                // weight on [-1,1] is 2 * (first component)^2
                let w = 2.0 * eig.eigenvectors[(0, i)].powi(2);
                (x, w)
            })
            .collect();
        pairs.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());

        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let nodes = pairs.iter().map(|p| mid + half * p.0).collect();
        let weights = pairs.iter().map(|p| half * p.1).collect();
        GaussLegendre { nodes, weights }
    }

    /// Integrate `f` over the rule's interval.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn integrates_polynomials_exactly() {
        // an n-point rule is exact through degree 2n-1
        let gl = GaussLegendre::new(4, 0.0, 1.0);
        assert_relative_eq!(gl.integrate(|x| x.powi(7)), 1.0 / 8.0, max_relative = 1e-13);
        assert_relative_eq!(gl.integrate(|_| 1.0), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn integrates_smooth_integrand() {
        let gl = GaussLegendre::new(32, 0.0, std::f64::consts::PI);
        assert_relative_eq!(gl.integrate(f64::sin), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn weights_sum_to_interval_length() {
        let gl = GaussLegendre::new(64, 0.0, 1.0);
        let total: f64 = gl.weights.iter().sum();
        assert_relative_eq!(total, 1.0, max_relative = 1e-13);
    }
}
