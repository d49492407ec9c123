//! Von Neumann analysis of the fully discrete schemes on uniform meshes:
//! Fourier symbol blocks of the upwind DG divergence, amplification matrices
//! of the Runge-Kutta stage recursions, maximal stable CFL numbers, and
//! fully discrete error predictions (numeric and closed form) for smooth
//! linear advection.

use num_complex::Complex64;

use crate::dg::SpaceLevel;
use crate::error::{Result, SolverError};
use crate::field::{DGField, ModeLayout};
use crate::linalg::CMat;
use crate::mesh::Mesh1D;
use crate::stepper::advection_op;
use crate::tableau::ExtendedTableau;

/// Spectral radii within this tolerance of one count as stable; the discrete
/// symbol touches the unit circle at xi = 0 for every consistent scheme.
const STABILITY_TOL: f64 = 1e-10;
/// Number of equally spaced xi samples on [0, 2 pi).
const XI_SAMPLES: usize = 1024;
/// Sub-CFL rungs checked below a candidate CFL; narrow instability windows
/// at intermediate CFL numbers would otherwise slip through bisection.
const LADDER_RUNGS: usize = 16;
/// Bisection width at which the CFL search stops.
const CFL_SEARCH_TOL: f64 = 1e-4;

/// Coupling blocks of the upwind DG divergence on a uniform mesh with h = 1:
/// d u_j / dt = C_prev u_{j-1} + C_self u_j in modal coordinates.
///
/// The blocks are extracted from the assembled operator itself on a periodic
/// three-cell patch, so the analysis sees exactly the discretization the
/// solver runs.
pub fn fourier_blocks(k: usize) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let mesh = Mesh1D::uniform((0.0, 3.0), 3)?;
    let op = advection_op(&mesh, 1.0);
    let layout = ModeLayout::one_d(k)?;
    let n = k + 1;
    let mut c_prev = vec![vec![0.0; n]; n];
    let mut c_self = vec![vec![0.0; n]; n];
    for col in 0..n {
        let mut field = DGField::zeros(layout.clone(), 1, 3);
        field.set(1, 0, col, 1.0);
        let div = op.divergence(&field, SpaceLevel::High, 0.0)?;
        for row in 0..n {
            c_self[row][col] = -div.get(1, 0, row);
            c_prev[row][col] = -div.get(2, 0, row);
        }
        // upwind coupling is strictly one-sided; anything reaching cell 0
        // would be wraparound contamination
        for row in 0..n {
            if div.get(0, 0, row).abs() > 1e-14 {
                return Err(SolverError::Domain(
                    "unexpected downwind coupling in divergence".into(),
                ));
            }
        }
    }
    Ok((c_prev, c_self))
}

/// Fourier symbol M(xi) = C_prev e^{-i xi} + C_self of the divergence at the
/// given space level. The reduced level zeroes the top-degree output row.
pub fn transfer_matrix(
    c_prev: &[Vec<f64>],
    c_self: &[Vec<f64>],
    level: SpaceLevel,
    xi: f64,
) -> CMat {
    let n = c_self.len();
    let phase = Complex64::from_polar(1.0, -xi);
    let mut m = CMat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, phase * c_prev[i][j] + c_self[i][j]);
        }
    }
    if level == SpaceLevel::Low {
        for j in 0..n {
            m.set(n - 1, j, Complex64::ZERO);
        }
    }
    m
}

/// Precomputed symbols for one polynomial degree.
pub struct SchemeSymbol {
    pub k: usize,
    c_prev: Vec<Vec<f64>>,
    c_self: Vec<Vec<f64>>,
}

impl SchemeSymbol {
    pub fn new(k: usize) -> Result<Self> {
        let (c_prev, c_self) = fourier_blocks(k)?;
        Ok(Self { k, c_prev, c_self })
    }

    pub fn transfer(&self, level: SpaceLevel, xi: f64) -> CMat {
        transfer_matrix(&self.c_prev, &self.c_self, level, xi)
    }

    /// Amplification matrix R(lambda, xi) of one full time step, following
    /// the stage recursion of the extended tableau.
    pub fn amplification(&self, tab: &ExtendedTableau, lambda: f64, xi: f64) -> Result<CMat> {
        let n = self.k + 1;
        let s = tab.n_stages();
        if self.k == 0 && tab.uses_reduced_space() {
            return Err(SolverError::InvalidArgument(
                "reduced-space schemes need k >= 1".into(),
            ));
        }
        let m_high = self.transfer(SpaceLevel::High, xi);
        let m_low = if tab.uses_reduced_space() {
            Some(self.transfer(SpaceLevel::Low, xi))
        } else {
            None
        };
        let m_at = |level: SpaceLevel| -> &CMat {
            match level {
                SpaceLevel::High => &m_high,
                SpaceLevel::Low => m_low.as_ref().unwrap(),
            }
        };
        let mut stages: Vec<CMat> = Vec::with_capacity(s);
        for i in 0..s {
            let mut si = CMat::identity(n);
            for j in 0..i {
                if tab.a[i][j] != 0.0 {
                    let prod = m_at(tab.d[i][j]).mul(&stages[j]);
                    si.add_scaled(Complex64::new(lambda * tab.a[i][j], 0.0), &prod);
                }
            }
            stages.push(si);
        }
        let mut r = CMat::identity(n);
        for i in 0..s {
            if tab.b[i] != 0.0 {
                let prod = m_at(tab.e[i]).mul(&stages[i]);
                r.add_scaled(Complex64::new(lambda * tab.b[i], 0.0), &prod);
            }
        }
        Ok(r)
    }

    /// Largest spectral radius of R(lambda, .) over the xi grid.
    pub fn max_spectral_radius(&self, tab: &ExtendedTableau, lambda: f64) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for xi in xi_grid() {
            let rho = self.amplification(tab, lambda, xi)?.spectral_radius()?;
            worst = worst.max(rho);
        }
        Ok(worst)
    }

    /// Stability of lambda together with the ladder of smaller CFL numbers
    /// below it (the stable set need not be an interval).
    pub fn is_stable(&self, tab: &ExtendedTableau, lambda: f64) -> Result<bool> {
        for rung in (1..=LADDER_RUNGS).rev() {
            let l = lambda * rung as f64 / LADDER_RUNGS as f64;
            for xi in xi_grid() {
                let rho = self.amplification(tab, l, xi)?.spectral_radius()?;
                if rho > 1.0 + STABILITY_TOL {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Largest CFL number lambda such that every smaller CFL is stable,
    /// located by bisection to within CFL_SEARCH_TOL.
    pub fn max_cfl(&self, tab: &ExtendedTableau) -> Result<f64> {
        let mut hi: f64 = 2.0;
        if self.is_stable(tab, hi)? {
            return Ok(hi);
        }
        let mut lo: f64 = 0.0;
        while hi - lo > CFL_SEARCH_TOL {
            let mid = 0.5 * (lo + hi);
            if self.is_stable(tab, mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }
}

fn xi_grid() -> impl Iterator<Item = f64> {
    (0..XI_SAMPLES)
        .map(|i| 2.0 * std::f64::consts::PI * i as f64 / XI_SAMPLES as f64)
        .chain([std::f64::consts::PI])
}

/// In-cell sample points (reference coordinates) at which the fully discrete
/// error is tracked; one point per mode.
pub fn sample_points(k: usize) -> Result<Vec<f64>> {
    match k {
        0 => Ok(vec![0.0]),
        1 => Ok(vec![-0.5, 0.5]),
        2 => Ok(vec![-2.0 / 3.0, 0.0, 2.0 / 3.0]),
        3 => Ok(vec![-0.75, -0.25, 0.25, 0.75]),
        4 => Ok(vec![-0.8, -0.4, 0.0, 0.4, 0.8]),
        _ => Err(SolverError::UnsupportedDegree(k)),
    }
}

/// Vandermonde matrix V with V[m][l] = b_l(r_m) mapping modal coefficients
/// to values at the sample points (the 1/sqrt(h) scaling cancels in the
/// similarity transform V R^n V^{-1}).
pub fn sample_vandermonde(k: usize) -> Result<CMat> {
    let points = sample_points(k)?;
    let n = k + 1;
    let mut v = CMat::zeros(n);
    for (m, &r) in points.iter().enumerate() {
        for l in 0..n {
            v.set(m, l, Complex64::new(crate::basis::ref_basis(l, r), 0.0));
        }
    }
    Ok(v)
}

fn invert(v: &CMat) -> Result<CMat> {
    let n = v.n;
    let mut inv = CMat::zeros(n);
    for col in 0..n {
        let mut e = vec![Complex64::ZERO; n];
        e[col] = Complex64::ONE;
        let x = v.solve(&e)?;
        for row in 0..n {
            inv.set(row, col, x[row]);
        }
    }
    Ok(inv)
}

/// Fully discrete error prediction for u(x, 0) = e^{ix} advected at unit
/// speed on a uniform N-cell grid of [-pi, pi): per-sample-point error
/// moduli after marching to t_end exactly as the solver does (full steps of
/// size lambda h plus a clipped final step).
pub fn predicted_errors(
    tab: &ExtendedTableau,
    k: usize,
    lambda: f64,
    n_cells: usize,
    t_end: f64,
) -> Result<Vec<f64>> {
    if !(lambda > 0.0) || n_cells == 0 || !(t_end > 0.0) {
        return Err(SolverError::InvalidArgument(
            "prediction needs positive lambda, t_end and cell count".into(),
        ));
    }
    let sym = SchemeSymbol::new(k)?;
    let h = 2.0 * std::f64::consts::PI / n_cells as f64;
    let xi = h;
    let dt = lambda * h;
    let n_full = (t_end / dt + 1e-12).floor() as u64;
    let remainder = t_end - n_full as f64 * dt;

    let mut total = sym.amplification(tab, lambda, xi)?.power(n_full);
    if remainder > 1e-12 * t_end {
        let partial = sym.amplification(tab, remainder / h, xi)?;
        total = partial.mul(&total);
    }

    let v = sample_vandermonde(k)?;
    let v_inv = invert(&v)?;
    let t = v.mul(&total).mul(&v_inv);

    let points = sample_points(k)?;
    let w0: Vec<Complex64> = points
        .iter()
        .map(|&r| Complex64::from_polar(1.0, 0.5 * xi * r))
        .collect();
    let evolved = t.matvec(&w0);
    let exact_phase = Complex64::from_polar(1.0, -t_end);
    Ok(evolved
        .iter()
        .zip(&w0)
        .map(|(got, &init)| (got - exact_phase * init).norm())
        .collect())
}

/// Worst-case sample-point error of the prediction.
pub fn predicted_error_star(
    tab: &ExtendedTableau,
    k: usize,
    lambda: f64,
    n_cells: usize,
    t_end: f64,
) -> Result<f64> {
    Ok(predicted_errors(tab, k, lambda, n_cells, t_end)?
        .into_iter()
        .fold(0.0f64, f64::max))
}

/// Schemes with a closed-form leading-order error expression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedFormScheme {
    /// Two-stage SSP scheme at degree k = 1.
    Rkdg2,
    /// Three-stage third-order schemes at degree k = 2.
    Rkdg3,
    /// Two-stage reduced-space family, first variant, degree k = 1.
    Generic2V1 { alpha: f64 },
    /// Three-stage reduced-space SSP scheme at degree k = 2.
    Ssprk3Sd,
}

/// Leading-order worst-sample-point error for smooth advection of e^{ix}
/// to time t at cell Fourier angle xi.
pub fn closed_form_error_star(
    scheme: ClosedFormScheme,
    lambda: f64,
    xi: f64,
    t: f64,
) -> Result<f64> {
    if !(lambda > 0.0 && xi > 0.0 && t > 0.0) {
        return Err(SolverError::Domain(
            "closed forms need positive lambda, xi and t".into(),
        ));
    }
    match scheme {
        ClosedFormScheme::Rkdg2 => {
            let l4 = lambda.powi(4);
            Ok((1.0 + 16.0 * l4 * t * t).sqrt() / 24.0 * xi * xi)
        }
        ClosedFormScheme::Rkdg3 => {
            let l6 = lambda.powi(6);
            Ok((1.0 + 100.0 * l6 * t * t).sqrt() / 240.0 * xi.powi(3))
        }
        ClosedFormScheme::Generic2V1 { alpha } => {
            let ratio = lambda / alpha;
            if !(0.0 < ratio && ratio < 2.0 / 3.0) {
                return Err(SolverError::Domain(format!(
                    "expression valid for 0 < lambda/alpha < 2/3, got {ratio}"
                )));
            }
            let a = alpha * (1.0 - 3.0 * lambda);
            let b = 1.0 - 2.0 * alpha - 3.0 * lambda
                + 6.0 * alpha * lambda
                + 2.0 * lambda * lambda;
            Ok((a * a + b * b * t * t).sqrt() / 12.0 * xi * xi)
        }
        ClosedFormScheme::Ssprk3Sd => {
            if !(lambda < 0.275) {
                return Err(SolverError::Domain(format!(
                    "expression valid for lambda < 0.275, got {lambda}"
                )));
            }
            let q = -12.0 * lambda.powi(3) + 2.0 * lambda * lambda - 3.0 * lambda + 1.0;
            let time_term = lambda.powi(6) * t * t / 576.0;
            let p1 = 5400.0 * lambda.powi(4) - 1200.0 * lambda.powi(3) + 44.0 * lambda * lambda
                - 39.0 * lambda
                + 4.0;
            let p2 = 600.0 * lambda.powi(4) - 280.0 * lambda.powi(3) + 56.0 * lambda * lambda
                - 33.0 * lambda
                + 6.0;
            let p3 = 16200.0 * lambda.powi(4) - 960.0 * lambda.powi(3) - 788.0 * lambda * lambda
                + 399.0 * lambda
                - 88.0;
            let e1 = (time_term + p1 * p1 / (41_990_400.0 * q * q)).sqrt();
            let e2 = (time_term + p2 * p2 / (1_440_000.0 * q * q)).sqrt();
            let e3 = (time_term + p3 * p3 / (1_049_760_000.0 * q * q)).sqrt();
            Ok(e1.max(e2).max(e3) * xi.powi(3))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tableau::builtin_tableau;

    #[test]
    fn degree_zero_blocks_are_upwind_differences() {
        let (c_prev, c_self) = fourier_blocks(0).unwrap();
        assert!((c_prev[0][0] - 1.0).abs() < 1e-14);
        assert!((c_self[0][0] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn blocks_conserve_mass_and_constants() {
        for k in 0..=3 {
            let (c_prev, c_self) = fourier_blocks(k).unwrap();
            // a constant state (only mode 0) has zero divergence: column 0 of
            // C_prev + C_self vanishes
            for row in 0..=k {
                assert!((c_prev[row][0] + c_self[row][0]).abs() < 1e-13, "k={k} row={row}");
            }
            // total mass is conserved: row 0 of C_prev + C_self vanishes
            for col in 0..=k {
                assert!((c_prev[0][col] + c_self[0][col]).abs() < 1e-13, "k={k} col={col}");
            }
        }
    }

    #[test]
    fn amplification_at_zero_angle_preserves_constants() {
        let sym = SchemeSymbol::new(1).unwrap();
        for name in ["rkdg2", "ssprk2_sd", "midpoint_sd"] {
            let tab = builtin_tableau(name).unwrap();
            let r = sym.amplification(&tab, 0.3, 0.0).unwrap();
            // constants are exact: first column of R is (1, 0)
            assert!((r.get(0, 0) - Complex64::ONE).norm() < 1e-13, "{name}");
            assert!(r.get(1, 0).norm() < 1e-13, "{name}");
        }
    }

    #[test]
    fn piecewise_constant_rk2_cfl_is_one() {
        let sym = SchemeSymbol::new(0).unwrap();
        let tab = builtin_tableau("rkdg2").unwrap();
        let cfl = sym.max_cfl(&tab).unwrap();
        assert!((cfl - 1.0).abs() < 0.002, "{cfl}");
    }

    #[test]
    fn known_cfl_numbers() {
        let sym = SchemeSymbol::new(1).unwrap();
        let tab = builtin_tableau("rkdg2").unwrap();
        let cfl = sym.max_cfl(&tab).unwrap();
        assert!((cfl - 1.0 / 3.0).abs() < 0.002, "rkdg2: {cfl}");

        let tab = builtin_tableau("ssprk2_sd").unwrap();
        let cfl = sym.max_cfl(&tab).unwrap();
        assert!(cfl > 0.5, "ssprk2_sd should beat 1/2: {cfl}");
    }

    #[test]
    fn numeric_prediction_matches_closed_form() {
        // the closed forms hold strictly inside the stable range; at the
        // stability boundary the parasitic mode stops decaying and the
        // asymptotic expression underestimates the error
        let tab = builtin_tableau("rkdg2").unwrap();
        let lambda = 0.3;
        let numeric = predicted_error_star(&tab, 1, lambda, 640, 1.0).unwrap();
        let xi = 2.0 * std::f64::consts::PI / 640.0;
        let closed = closed_form_error_star(ClosedFormScheme::Rkdg2, lambda, xi, 1.0).unwrap();
        let rel = (numeric - closed).abs() / closed;
        assert!(rel < 0.05, "numeric {numeric:.4e} vs closed {closed:.4e} (rel {rel:.3})");

        let tab = builtin_tableau("ssprk3_sd").unwrap();
        let lambda = 0.05;
        let numeric = predicted_error_star(&tab, 2, lambda, 640, 1.0).unwrap();
        let closed = closed_form_error_star(ClosedFormScheme::Ssprk3Sd, lambda, xi, 1.0).unwrap();
        let rel = (numeric - closed).abs() / closed;
        assert!(rel < 0.05, "numeric {numeric:.4e} vs closed {closed:.4e} (rel {rel:.3})");
    }

    #[test]
    fn closed_form_domains_enforced() {
        assert!(closed_form_error_star(
            ClosedFormScheme::Generic2V1 { alpha: 1.0 },
            0.7,
            0.01,
            1.0
        )
        .is_err());
        assert!(closed_form_error_star(ClosedFormScheme::Ssprk3Sd, 0.3, 0.01, 1.0).is_err());
        assert!(closed_form_error_star(ClosedFormScheme::Rkdg2, -0.1, 0.01, 1.0).is_err());
    }

    #[test]
    fn reduced_space_needs_degree_one() {
        let sym = SchemeSymbol::new(0).unwrap();
        let tab = builtin_tableau("ssprk2_sd").unwrap();
        assert!(sym.amplification(&tab, 0.3, 1.0).is_err());
    }
}
