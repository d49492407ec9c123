//! Dense complex matrices of the small fixed sizes that appear in Fourier
//! analysis of the schemes (one block per polynomial degree, so at most 5x5).
//!
//! Spectral radii go through the characteristic polynomial, assembled with
//! the Faddeev-LeVerrier recurrence and solved with Durand-Kerner iteration;
//! matrix powers use binary powering, which is stable for the amplification
//! matrices of interest since their spectral radius stays near one.

use num_complex::Complex64;

use crate::error::{Result, SolverError};

/// Row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex64::ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::ONE;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n);
            data.extend_from_slice(r);
        }
        Self { n, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        let n = self.n;
        debug_assert_eq!(n, other.n);
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for kk in 0..n {
                let a = self.get(i, kk);
                if a != Complex64::ZERO {
                    for j in 0..n {
                        out.data[i * n + j] += a * other.get(kk, j);
                    }
                }
            }
        }
        out
    }

    pub fn add_scaled(&mut self, s: Complex64, other: &CMat) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// self^p by binary powering.
    pub fn power(&self, mut p: u64) -> CMat {
        let mut result = CMat::identity(self.n);
        let mut base = self.clone();
        while p > 0 {
            if p & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            p >>= 1;
        }
        result
    }

    /// Monic characteristic polynomial coefficients [c_1, ..., c_n] of
    /// det(zI - A) = z^n + c_1 z^{n-1} + ... + c_n (Faddeev-LeVerrier).
    pub fn char_poly(&self) -> Vec<Complex64> {
        let n = self.n;
        let mut coeffs = Vec::with_capacity(n);
        let mut m = CMat::zeros(n);
        for i in 1..=n {
            // M_i = A (M_{i-1} + c_{i-1} I), with M_0 = 0, c_0 = 1
            let mut shifted = m.clone();
            if i == 1 {
                shifted = CMat::identity(n);
            } else {
                let c_prev = coeffs[i - 2];
                for d in 0..n {
                    let v = shifted.get(d, d) + c_prev;
                    shifted.set(d, d, v);
                }
            }
            m = self.mul(&shifted);
            let c = -m.trace() / (i as f64);
            coeffs.push(c);
        }
        coeffs
    }

    /// Eigenvalues as the roots of the characteristic polynomial. Sizes one
    /// and two use the closed-form roots.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        match self.n {
            1 => Ok(vec![self.data[0]]),
            2 => {
                let tr = self.trace();
                let det = self.get(0, 0) * self.get(1, 1) - self.get(0, 1) * self.get(1, 0);
                let disc = (tr * tr - 4.0 * det).sqrt();
                Ok(vec![0.5 * (tr + disc), 0.5 * (tr - disc)])
            }
            _ => polynomial_roots(&self.char_poly()),
        }
    }

    /// Max eigenvalue modulus.
    pub fn spectral_radius(&self) -> Result<f64> {
        Ok(self
            .eigenvalues()?
            .iter()
            .fold(0.0f64, |m, z| m.max(z.norm())))
    }

    /// Solve A x = b by Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut x = b.to_vec();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| {
                    a[i * n + col]
                        .norm_sqr()
                        .partial_cmp(&a[j * n + col].norm_sqr())
                        .unwrap()
                })
                .unwrap();
            if a[pivot * n + col].norm() < 1e-300 {
                return Err(SolverError::Domain("singular complex system".into()));
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                }
                x.swap(col, pivot);
            }
            let inv = a[col * n + col].inv();
            for i in (col + 1)..n {
                let f = a[i * n + col] * inv;
                if f != Complex64::ZERO {
                    for j in col..n {
                        let v = a[col * n + j];
                        a[i * n + j] -= f * v;
                    }
                    let xv = x[col];
                    x[i] -= f * xv;
                }
            }
        }
        for col in (0..n).rev() {
            let mut v = x[col];
            for j in (col + 1)..n {
                v -= a[col * n + j] * x[j];
            }
            x[col] = v / a[col * n + col];
        }
        Ok(x)
    }
}

/// Roots of the monic polynomial z^n + c[0] z^{n-1} + ... + c[n-1] by
/// Durand-Kerner iteration.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len();
    if n == 0 {
        return Ok(vec![]);
    }
    let eval = |z: Complex64| -> Complex64 {
        let mut v = Complex64::ONE;
        for &c in coeffs {
            v = v * z + c;
        }
        v
    };
    // radius bound keeps the initial guesses around the root annulus
    let bound = 1.0 + coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n)
        .map(|i| bound * seed.powu(i as u32 + 1))
        .collect();
    for _ in 0..500 {
        let mut delta: f64 = 0.0;
        for i in 0..n {
            let mut denom = Complex64::ONE;
            for j in 0..n {
                if j != i {
                    denom *= z[i] - z[j];
                }
            }
            if denom.norm() < 1e-300 {
                // coincident iterates: nudge apart and retry next sweep
                z[i] += Complex64::new(1e-8, 1e-8);
                delta = f64::INFINITY;
                continue;
            }
            let step = eval(z[i]) / denom;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-14 * bound.max(1.0) {
            return Ok(z);
        }
    }
    // accept if the residuals are small even without step convergence
    let worst = z.iter().map(|&r| eval(r).norm()).fold(0.0f64, f64::max);
    if worst < 1e-9 * bound.max(1.0) {
        Ok(z)
    } else {
        Err(SolverError::Domain(format!(
            "root iteration failed to converge (residual {worst:.3e})"
        )))
    }
}
