//! Gauss-Legendre and Gauss-Lobatto rules on the reference interval [-1, 1].

use crate::basis::{legendre, legendre_deriv};
use crate::error::{Result, SolverError};

/// Points and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// n-point Gauss-Legendre rule, exact for polynomials of degree 2n-1.
    ///
    /// Roots of P_n are found by Newton iteration from the Chebyshev-like
    /// initial guess; converges to machine precision in a handful of steps.
    pub fn gauss_legendre(n: usize) -> Result<Self> {
        if n == 0 || n > 32 {
            return Err(SolverError::InvalidArgument(format!(
                "gauss-legendre point count {n} out of range 1..=32"
            )));
        }
        let mut points = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            let mut x = -(std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let p = legendre(n, x);
                let dp = legendre_deriv(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let dp = legendre_deriv(n, x);
            points[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        Ok(Self { points, weights })
    }

    /// n-point Gauss-Lobatto rule (includes both endpoints), n in 2..=4.
    ///
    /// These are the check-point sets used by the maximum-principle scaling
    /// limiter, so only the small sizes needed for k <= 4 are provided.
    pub fn gauss_lobatto(n: usize) -> Result<Self> {
        let (points, weights): (Vec<f64>, Vec<f64>) = match n {
            2 => (vec![-1.0, 1.0], vec![1.0, 1.0]),
            3 => (vec![-1.0, 0.0, 1.0], vec![1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0]),
            4 => {
                let a = (1.0f64 / 5.0).sqrt();
                (
                    vec![-1.0, -a, a, 1.0],
                    vec![1.0 / 6.0, 5.0 / 6.0, 5.0 / 6.0, 1.0 / 6.0],
                )
            }
            _ => {
                return Err(SolverError::InvalidArgument(format!(
                    "gauss-lobatto point count {n} out of range 2..=4"
                )))
            }
        };
        Ok(Self { points, weights })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Volume-integration rule used for all DG assembly at degree k: k+2 points,
/// exact through degree 2k+3, leaving margin for nonlinear fluxes.
pub fn volume_rule(k: usize) -> Result<QuadratureRule> {
    QuadratureRule::gauss_legendre(k + 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exactness() {
        // n points integrate x^m exactly for m <= 2n-1
        for n in 1..=8 {
            let rule = QuadratureRule::gauss_legendre(n).unwrap();
            for m in 0..(2 * n) {
                let num: f64 = rule
                    .points
                    .iter()
                    .zip(&rule.weights)
                    .map(|(x, w)| w * x.powi(m as i32))
                    .sum();
                let exact = if m % 2 == 0 { 2.0 / (m as f64 + 1.0) } else { 0.0 };
                assert!(
                    (num - exact).abs() < 1e-13,
                    "n={n} m={m}: {num} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn lobatto_exactness() {
        // n-point Lobatto is exact through degree 2n-3
        for n in 2..=4 {
            let rule = QuadratureRule::gauss_lobatto(n).unwrap();
            for m in 0..=(2 * n - 3) {
                let num: f64 = rule
                    .points
                    .iter()
                    .zip(&rule.weights)
                    .map(|(x, w)| w * x.powi(m as i32))
                    .sum();
                let exact = if m % 2 == 0 { 2.0 / (m as f64 + 1.0) } else { 0.0 };
                assert!((num - exact).abs() < 1e-13, "n={n} m={m}");
            }
        }
    }

    #[test]
    fn bad_sizes_rejected() {
        assert!(QuadratureRule::gauss_legendre(0).is_err());
        assert!(QuadratureRule::gauss_lobatto(5).is_err());
    }
}
