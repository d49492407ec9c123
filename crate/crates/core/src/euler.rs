//! Exact Riemann solver for the 1D compressible Euler equations.
//!
//! The star-region pressure is found by Newton iteration on the pressure
//! function; each side contributes a shock branch (Rankine-Hugoniot) or a
//! rarefaction branch (isentropic relations). The solution is self-similar
//! and is sampled at a given x/t.

use crate::error::{Result, SolverError};

/// Primitive state (density, velocity, pressure) on one side of the
/// discontinuity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

impl Primitive {
    pub fn new(rho: f64, u: f64, p: f64) -> Self {
        Self { rho, u, p }
    }

    /// Sound speed.
    pub fn sound_speed(&self, gamma: f64) -> f64 {
        (gamma * self.p / self.rho).sqrt()
    }
}

/// Exact self-similar solution of a Riemann problem.
#[derive(Debug, Clone)]
pub struct ExactRiemann {
    pub left: Primitive,
    pub right: Primitive,
    pub gamma: f64,
    pub p_star: f64,
    pub u_star: f64,
}

/// Pressure function f_K(p) for one side and its derivative: the velocity
/// change across the wave connecting the side state to pressure p.
fn side_function(p: f64, side: &Primitive, gamma: f64) -> (f64, f64) {
    let c = side.sound_speed(gamma);
    if p > side.p {
        // shock branch
        let a = 2.0 / ((gamma + 1.0) * side.rho);
        let b = (gamma - 1.0) / (gamma + 1.0) * side.p;
        let root = (a / (p + b)).sqrt();
        let f = (p - side.p) * root;
        let df = root * (1.0 - 0.5 * (p - side.p) / (p + b));
        (f, df)
    } else {
        // rarefaction branch
        let exponent = (gamma - 1.0) / (2.0 * gamma);
        let ratio = (p / side.p).powf(exponent);
        let f = 2.0 * c / (gamma - 1.0) * (ratio - 1.0);
        let df = ratio / (side.rho * c) * (side.p / p).powf((gamma + 1.0) / (2.0 * gamma));
        (f, df)
    }
}

/// Solve the Riemann problem exactly.
pub fn solve_riemann(left: Primitive, right: Primitive, gamma: f64) -> Result<ExactRiemann> {
    for (label, s) in [("left", &left), ("right", &right)] {
        if !(s.rho > 0.0) || !(s.p > 0.0) || !s.u.is_finite() {
            return Err(SolverError::InvalidArgument(format!(
                "{label} Riemann state needs positive density and pressure, got {s:?}"
            )));
        }
    }
    let cl = left.sound_speed(gamma);
    let cr = right.sound_speed(gamma);
    let du = right.u - left.u;
    // pressure positivity (no vacuum formation)
    if 2.0 * (cl + cr) / (gamma - 1.0) <= du {
        return Err(SolverError::Domain(
            "Riemann problem generates vacuum".into(),
        ));
    }
    // two-rarefaction initial guess, floored away from zero
    let exponent = (gamma - 1.0) / (2.0 * gamma);
    let guess = ((cl + cr - 0.5 * (gamma - 1.0) * du)
        / (cl / left.p.powf(exponent) + cr / right.p.powf(exponent)))
    .powf(1.0 / exponent);
    let mut p = guess.max(1e-14);
    for _ in 0..100 {
        let (fl, dfl) = side_function(p, &left, gamma);
        let (fr, dfr) = side_function(p, &right, gamma);
        let f = fl + fr + du;
        let step = f / (dfl + dfr);
        let p_new = (p - step).max(1e-14 * p);
        let change = (p_new - p).abs() / (0.5 * (p_new + p));
        p = p_new;
        if change < 1e-14 {
            break;
        }
    }
    let (fl, _) = side_function(p, &left, gamma);
    let (fr, _) = side_function(p, &right, gamma);
    let residual = (fl + fr + du).abs();
    let scale = (cl + cr).max(du.abs());
    if residual > 1e-10 * scale.max(1.0) {
        return Err(SolverError::Domain(format!(
            "Riemann pressure iteration stalled (residual {residual:.3e})"
        )));
    }
    let u_star = 0.5 * (left.u + right.u) + 0.5 * (fr - fl);
    Ok(ExactRiemann { left, right, gamma, p_star: p, u_star })
}

impl ExactRiemann {
    /// Sample the solution at similarity coordinate s = x/t.
    pub fn sample(&self, s: f64) -> Primitive {
        if s <= self.u_star {
            self.sample_side(s, self.left, -1.0)
        } else {
            self.sample_side(s, self.right, 1.0)
        }
    }

    /// One half of the fan; `sign` is -1 for the left side, +1 for the right,
    /// so both branches share the mirrored formulas.
    fn sample_side(&self, s: f64, side: Primitive, sign: f64) -> Primitive {
        let g = self.gamma;
        let c = side.sound_speed(g);
        let p_ratio = self.p_star / side.p;
        if self.p_star > side.p {
            // shock: single jump at the shock speed
            let shock_speed =
                side.u + sign * c * ((g + 1.0) / (2.0 * g) * p_ratio + (g - 1.0) / (2.0 * g)).sqrt();
            if sign * (s - shock_speed) >= 0.0 {
                return side;
            }
            let gm = (g - 1.0) / (g + 1.0);
            let rho = side.rho * (p_ratio + gm) / (gm * p_ratio + 1.0);
            Primitive::new(rho, self.u_star, self.p_star)
        } else {
            // rarefaction: head, fan interior, tail
            let c_star = c * p_ratio.powf((g - 1.0) / (2.0 * g));
            let head = side.u + sign * c;
            let tail = self.u_star + sign * c_star;
            if sign * (s - head) >= 0.0 {
                return side;
            }
            if sign * (s - tail) <= 0.0 {
                let rho = side.rho * p_ratio.powf(1.0 / g);
                return Primitive::new(rho, self.u_star, self.p_star);
            }
            let frac = 2.0 / (g + 1.0) - sign * (g - 1.0) / ((g + 1.0) * c) * (side.u - s);
            let rho = side.rho * frac.powf(2.0 / (g - 1.0));
            let u = 2.0 / (g + 1.0) * (-sign * c + 0.5 * (g - 1.0) * side.u + s);
            let p = side.p * frac.powf(2.0 * g / (g - 1.0));
            Primitive::new(rho, u, p)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GAMMA: f64 = 1.4;

    #[test]
    fn sod_star_state() {
        let left = Primitive::new(1.0, 0.0, 1.0);
        let right = Primitive::new(0.125, 0.0, 0.1);
        let sol = solve_riemann(left, right, GAMMA).unwrap();
        assert!((sol.p_star - 0.30313).abs() < 5e-6, "p* = {}", sol.p_star);
        assert!((sol.u_star - 0.92745).abs() < 5e-6, "u* = {}", sol.u_star);
    }

    #[test]
    fn far_field_recovers_inputs() {
        let left = Primitive::new(1.0, 0.3, 2.0);
        let right = Primitive::new(0.4, -0.5, 0.6);
        let sol = solve_riemann(left, right, GAMMA).unwrap();
        assert_eq!(sol.sample(-100.0), left);
        assert_eq!(sol.sample(100.0), right);
    }

    #[test]
    fn equal_states_give_trivial_solution() {
        let s = Primitive::new(1.3, 0.7, 0.9);
        let sol = solve_riemann(s, s, GAMMA).unwrap();
        assert!((sol.p_star - s.p).abs() < 1e-12);
        assert!((sol.u_star - s.u).abs() < 1e-12);
        for xi in [-2.0, 0.0, 0.7, 3.0] {
            let q = sol.sample(xi);
            assert!((q.rho - s.rho).abs() < 1e-12);
            assert!((q.p - s.p).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_collision_is_mirror_symmetric() {
        // equal streams colliding: u* = 0, two shocks
        let left = Primitive::new(1.0, 1.0, 1.0);
        let right = Primitive::new(1.0, -1.0, 1.0);
        let sol = solve_riemann(left, right, GAMMA).unwrap();
        assert!(sol.u_star.abs() < 1e-12);
        assert!(sol.p_star > 1.0);
        for xi in [0.3, 0.9, 1.7] {
            let a = sol.sample(xi);
            let b = sol.sample(-xi);
            assert!((a.rho - b.rho).abs() < 1e-12);
            assert!((a.u + b.u).abs() < 1e-12);
            assert!((a.p - b.p).abs() < 1e-12);
        }
    }

    #[test]
    fn rarefaction_fan_is_continuous_and_isentropic() {
        // strong expansion: both waves are rarefactions
        let left = Primitive::new(1.0, -0.5, 1.0);
        let right = Primitive::new(1.0, 0.5, 1.0);
        let sol = solve_riemann(left, right, GAMMA).unwrap();
        assert!(sol.p_star < 1.0);
        let mut prev = sol.sample(-3.0);
        let mut xi = -3.0;
        while xi < 3.0 {
            xi += 0.01;
            let q = sol.sample(xi);
            assert!((q.rho - prev.rho).abs() < 0.02, "jump at xi={xi}");
            // entropy p/rho^gamma stays at the left value through the left fan
            if xi < sol.u_star {
                let s0 = left.p / left.rho.powf(GAMMA);
                let s1 = q.p / q.rho.powf(GAMMA);
                assert!((s1 - s0).abs() < 1e-10);
            }
            prev = q;
        }
    }

    #[test]
    fn shock_satisfies_rankine_hugoniot() {
        let left = Primitive::new(1.0, 0.75, 1.0);
        let right = Primitive::new(0.125, 0.0, 0.1);
        let sol = solve_riemann(left, right, GAMMA).unwrap();
        // right wave is a shock; find its speed from mass conservation
        let q = sol.sample(sol.u_star + 1e-9);
        let sigma = (q.rho * q.u - right.rho * right.u) / (q.rho - right.rho);
        // momentum jump check
        let m_in = q.rho * q.u * (q.u - sigma) + q.p;
        let m_out = right.rho * right.u * (right.u - sigma) + right.p;
        assert!((m_in - m_out).abs() < 1e-9, "momentum jump {}", m_in - m_out);
    }

    #[test]
    fn vacuum_formation_is_rejected() {
        let left = Primitive::new(1.0, -10.0, 1.0);
        let right = Primitive::new(1.0, 10.0, 1.0);
        assert!(solve_riemann(left, right, GAMMA).is_err());
    }
}
