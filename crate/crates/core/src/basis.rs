//! Orthonormal modal Legendre bases on reference cells.
//!
//! The physical basis on a 1D cell of size h is phi_l(x) = b_l(r)/sqrt(h)
//! with b_l(r) = sqrt(2l+1) P_l(r) and r in [-1, 1], so that
//! int_cell phi_l phi_m dx = delta_lm. In 2D the basis is the tensor product
//! restricted to total degree <= k (the P^k space).

use crate::error::{Result, SolverError};

pub const MAX_DEGREE: usize = 4;

/// Legendre polynomial P_n(x) by the three-term recurrence.
pub fn legendre(n: usize, x: f64) -> f64 {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return p0;
    }
    for m in 1..n {
        let m = m as f64;
        let p2 = ((2.0 * m + 1.0) * x * p1 - m * p0) / (m + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Derivative P_n'(x).
pub fn legendre_deriv(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if (x.abs() - 1.0).abs() < 1e-14 {
        // limit value at the endpoints
        let s = if x > 0.0 { 1.0 } else { (-1.0f64).powi(n as i32 + 1) };
        return s * 0.5 * (n * (n + 1)) as f64;
    }
    let n_f = n as f64;
    n_f * (x * legendre(n, x) - legendre(n - 1, x)) / (x * x - 1.0)
}

/// Reference-normalized basis value b_l(r) = sqrt(2l+1) P_l(r).
#[inline]
pub fn ref_basis(l: usize, r: f64) -> f64 {
    ((2 * l + 1) as f64).sqrt() * legendre(l, r)
}

/// Derivative of b_l with respect to the reference coordinate r.
#[inline]
pub fn ref_basis_deriv(l: usize, r: f64) -> f64 {
    ((2 * l + 1) as f64).sqrt() * legendre_deriv(l, r)
}

/// 1D modal basis of degree k on a cell of size h.
#[derive(Debug, Clone)]
pub struct BasisSet {
    pub k: usize,
}

impl BasisSet {
    pub fn new(k: usize) -> Result<Self> {
        if k > MAX_DEGREE {
            return Err(SolverError::UnsupportedDegree(k));
        }
        Ok(Self { k })
    }

    pub fn dim(&self) -> usize {
        self.k + 1
    }

    /// phi_l at reference coordinate r on a physical cell of size h.
    pub fn eval(&self, l: usize, r: f64, h: f64) -> f64 {
        ref_basis(l, r) / h.sqrt()
    }
}

/// Index pairs (a, b) of the 2D P^k basis, ordered by total degree then a.
pub fn modes_2d(k: usize) -> Vec<(usize, usize)> {
    let mut modes = Vec::with_capacity((k + 1) * (k + 2) / 2);
    for deg in 0..=k {
        for a in (0..=deg).rev() {
            modes.push((a, deg - a));
        }
    }
    modes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::QuadratureRule;

    #[test]
    fn gram_matrix_identity() {
        // orthonormality on physical cells of several sizes
        let rule = QuadratureRule::gauss_legendre(8).unwrap();
        for &h in &[0.1, 1.0, 3.0] {
            for k in 0..=MAX_DEGREE {
                let basis = BasisSet::new(k).unwrap();
                for l in 0..=k {
                    for m in 0..=k {
                        let mut g = 0.0;
                        for (r, w) in rule.points.iter().zip(&rule.weights) {
                            g += w * basis.eval(l, *r, h) * basis.eval(m, *r, h) * h / 2.0;
                        }
                        let expect = if l == m { 1.0 } else { 0.0 };
                        assert!((g - expect).abs() < 1e-12, "h={h} k={k} ({l},{m}): {g}");
                    }
                }
            }
        }
    }

    #[test]
    fn mean_mode_is_inverse_sqrt_h() {
        let basis = BasisSet::new(1).unwrap();
        let h = 0.37;
        assert!((basis.eval(0, -0.4, h) - 1.0 / h.sqrt()).abs() < 1e-15);
        // phi_1 vanishes at the cell midpoint
        assert_eq!(basis.eval(1, 0.0, h), 0.0);
        // phi_1(r) = sqrt(3/h) r
        assert!((basis.eval(1, 1.0, h) - (3.0 / h).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn deriv_matches_finite_difference() {
        for n in 0..=5 {
            for &x in &[-0.9, -0.3, 0.0, 0.5, 0.8] {
                let e = 1e-6;
                let fd = (legendre(n, x + e) - legendre(n, x - e)) / (2.0 * e);
                assert!((legendre_deriv(n, x) - fd).abs() < 1e-8, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn modes_2d_dimension() {
        for k in 0..=MAX_DEGREE {
            assert_eq!(modes_2d(k).len(), (k + 1) * (k + 2) / 2);
        }
        assert_eq!(modes_2d(1), vec![(0, 0), (1, 0), (0, 1)]);
    }

    #[test]
    fn degree_five_rejected() {
        assert!(BasisSet::new(5).is_err());
    }
}
