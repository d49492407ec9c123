//! Conservation-law systems: linear advection, Burgers, and the 1D/2D Euler
//! equations of gas dynamics.

use crate::error::{Result, SolverError};

pub const MAX_COMP: usize = 4;

/// Fixed-size state vector; only the first `n_comp` entries are meaningful.
pub type State = [f64; MAX_COMP];

const DENSITY_FLOOR: f64 = 1e-12;
const PRESSURE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum System {
    Advection { speed: f64 },
    Burgers,
    Euler1d { gamma: f64 },
    Euler2d { gamma: f64 },
}

impl System {
    pub fn n_comp(&self) -> usize {
        match self {
            System::Advection { .. } | System::Burgers => 1,
            System::Euler1d { .. } => 3,
            System::Euler2d { .. } => 4,
        }
    }

    pub fn gamma(&self) -> Option<f64> {
        match self {
            System::Euler1d { gamma } | System::Euler2d { gamma } => Some(*gamma),
            _ => None,
        }
    }

    /// Physical flux component in direction `dir` (0 = x, 1 = y).
    pub fn flux(&self, u: &State, dir: usize) -> State {
        let mut f = [0.0; MAX_COMP];
        match self {
            System::Advection { speed } => f[0] = speed * u[0],
            System::Burgers => f[0] = 0.5 * u[0] * u[0],
            System::Euler1d { gamma } => {
                let rho = u[0];
                let w = u[1] / rho;
                let p = (gamma - 1.0) * (u[2] - 0.5 * rho * w * w);
                f[0] = u[1];
                f[1] = u[1] * w + p;
                f[2] = w * (u[2] + p);
            }
            System::Euler2d { gamma } => {
                let rho = u[0];
                let w = u[1] / rho;
                let v = u[2] / rho;
                let p = (gamma - 1.0) * (u[3] - 0.5 * rho * (w * w + v * v));
                if dir == 0 {
                    f[0] = u[1];
                    f[1] = u[1] * w + p;
                    f[2] = u[2] * w;
                    f[3] = w * (u[3] + p);
                } else {
                    f[0] = u[2];
                    f[1] = u[1] * v;
                    f[2] = u[2] * v + p;
                    f[3] = v * (u[3] + p);
                }
            }
        }
        f
    }

    pub fn pressure(&self, u: &State) -> Option<f64> {
        match self {
            System::Euler1d { gamma } => {
                Some((gamma - 1.0) * (u[2] - 0.5 * u[1] * u[1] / u[0]))
            }
            System::Euler2d { gamma } => {
                Some((gamma - 1.0) * (u[3] - 0.5 * (u[1] * u[1] + u[2] * u[2]) / u[0]))
            }
            _ => None,
        }
    }

    /// Characteristic speed bound |f'.nu| (scalar) or |velocity.nu| + c (Euler)
    /// in direction `dir`.
    pub fn max_wave_speed(&self, u: &State, dir: usize) -> Result<f64> {
        match self {
            System::Advection { speed } => Ok(speed.abs()),
            System::Burgers => Ok(u[0].abs()),
            System::Euler1d { gamma } => {
                let (rho, p) = (u[0], self.pressure(u).unwrap());
                self.check_admissible(u, "wave speed")?;
                Ok((u[1] / rho).abs() + (gamma * p / rho).sqrt())
            }
            System::Euler2d { gamma } => {
                let rho = u[0];
                let p = self.pressure(u).unwrap();
                self.check_admissible(u, "wave speed")?;
                let vel = if dir == 0 { u[1] / rho } else { u[2] / rho };
                Ok(vel.abs() + (gamma * p / rho).sqrt())
            }
        }
    }

    /// Density/pressure floors are error conditions, never silently clipped.
    pub fn check_admissible(&self, u: &State, context: &str) -> Result<()> {
        match self {
            System::Euler1d { .. } | System::Euler2d { .. } => {
                let rho = u[0];
                let p = self.pressure(u).unwrap();
                if !(rho > DENSITY_FLOOR && p > PRESSURE_FLOOR) || !rho.is_finite() || !p.is_finite()
                {
                    return Err(SolverError::State {
                        context: context.to_string(),
                        rho,
                        p,
                    });
                }
                Ok(())
            }
            _ => {
                if u[0].is_finite() {
                    Ok(())
                } else {
                    Err(SolverError::State {
                        context: context.to_string(),
                        rho: u[0],
                        p: 0.0,
                    })
                }
            }
        }
    }

    /// Mirror the normal velocity component for a reflective wall with
    /// outward normal along axis `dir`.
    pub fn reflect(&self, u: &State, dir: usize) -> State {
        let mut g = *u;
        match self {
            System::Euler1d { .. } => g[1] = -g[1],
            System::Euler2d { .. } => {
                if dir == 0 {
                    g[1] = -g[1];
                } else {
                    g[2] = -g[2];
                }
            }
            _ => {}
        }
        g
    }
}

/// Primitive (rho, velocity, p) to conserved variables. 1D Euler.
pub fn primitive_to_conserved_1d(rho: f64, w: f64, p: f64, gamma: f64) -> Result<State> {
    if !(rho > 0.0 && p > 0.0) {
        return Err(SolverError::State { context: "primitive_to_conserved".into(), rho, p });
    }
    Ok([rho, rho * w, p / (gamma - 1.0) + 0.5 * rho * w * w, 0.0])
}

/// Conserved to primitive (rho, w, p). 1D Euler.
pub fn conserved_to_primitive_1d(u: &State, gamma: f64) -> Result<(f64, f64, f64)> {
    let rho = u[0];
    let w = u[1] / rho;
    let p = (gamma - 1.0) * (u[2] - 0.5 * rho * w * w);
    if !(rho > 0.0 && p > 0.0) {
        return Err(SolverError::State { context: "conserved_to_primitive".into(), rho, p });
    }
    Ok((rho, w, p))
}

/// Primitive (rho, w, v, p) to conserved variables. 2D Euler.
pub fn primitive_to_conserved_2d(rho: f64, w: f64, v: f64, p: f64, gamma: f64) -> Result<State> {
    if !(rho > 0.0 && p > 0.0) {
        return Err(SolverError::State { context: "primitive_to_conserved".into(), rho, p });
    }
    Ok([
        rho,
        rho * w,
        rho * v,
        p / (gamma - 1.0) + 0.5 * rho * (w * w + v * v),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::SplitMix64;

    #[test]
    fn energy_formula() {
        let u = primitive_to_conserved_1d(1.0, 1.0, 1.0, 1.4).unwrap();
        assert!((u[2] - 3.0).abs() < 1e-15);
        let sod_r = primitive_to_conserved_1d(0.125, 0.0, 0.1, 1.4).unwrap();
        assert!((sod_r[2] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn primitive_round_trip() {
        let mut rng = SplitMix64::new(42);
        for _ in 0..100 {
            let rho = 0.1 + 3.0 * rng.next_f64();
            let w = 4.0 * rng.next_f64() - 2.0;
            let p = 0.05 + 5.0 * rng.next_f64();
            let u = primitive_to_conserved_1d(rho, w, p, 1.4).unwrap();
            let (r2, w2, p2) = conserved_to_primitive_1d(&u, 1.4).unwrap();
            assert!((r2 - rho).abs() < 1e-14 * rho.max(1.0));
            assert!((w2 - w).abs() < 1e-14 * w.abs().max(1.0));
            assert!((p2 - p).abs() < 1e-14 * p.max(1.0));
        }
    }

    #[test]
    fn non_physical_rejected() {
        assert!(primitive_to_conserved_1d(-1.0, 0.0, 1.0, 1.4).is_err());
        assert!(primitive_to_conserved_1d(1.0, 0.0, -1.0, 1.4).is_err());
        let sys = System::Euler1d { gamma: 1.4 };
        let bad = [1.0, 10.0, 1.0, 0.0]; // negative pressure
        assert!(sys.check_admissible(&bad, "test").is_err());
    }
}
