//! Benchmark scenario catalog: PDE, initial and boundary data, exact or
//! reference solutions, and default run parameters for every built-in test
//! problem.
//!
//! Smooth problems carry an exact solution handle; the 1D shock problems
//! either compare against the exact Riemann sampler (Sod) or against a
//! cached fine-mesh reference run (blast, Shu-Osher). The 2D shock problems
//! are judged by stability and physical density bounds.

use std::sync::Arc;

use crate::dg::{AxisBc2d, Bc1d, Bc2d, EdgeBc2d, EndBc1d};
use crate::error::{Result, SolverError};
use crate::euler::{solve_riemann, Primitive};
use crate::flux::FluxKind;
use crate::limiter::LimiterVariables;
use crate::mesh::MaskSpec;
use crate::system::{primitive_to_conserved_1d, primitive_to_conserved_2d, State, System};

pub const GAMMA: f64 = 1.4;

/// Pointwise initial data in conserved variables.
pub type InitFn1d = Arc<dyn Fn(f64) -> State + Send + Sync>;
pub type InitFn2d = Arc<dyn Fn(f64, f64) -> State + Send + Sync>;

/// Exact solution in conserved variables; errors when the scenario has no
/// classical solution at the requested time (e.g. Burgers past shock
/// formation).
pub type ExactFn1d = Arc<dyn Fn(f64, f64) -> Result<State> + Send + Sync>;
pub type ExactFn2d = Arc<dyn Fn(f64, f64, f64) -> Result<State> + Send + Sync>;

/// Limiter configuration for a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimiterConfig {
    pub tvb_m: f64,
    pub variables: LimiterVariables,
}

/// How a scenario without an exact solution is judged.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSpec {
    /// Standard full-space scheme used for the reference run.
    pub scheme: &'static str,
    pub k: usize,
    pub cfl: f64,
    /// Mesh refinement factor relative to the run under test.
    pub refine: usize,
}

pub struct Scenario1d {
    pub name: &'static str,
    pub system: System,
    pub flux: FluxKind,
    pub domain: (f64, f64),
    pub bc: Bc1d,
    pub t_end: f64,
    pub default_n: usize,
    pub limiter: Option<LimiterConfig>,
    pub init: InitFn1d,
    pub exact: Option<ExactFn1d>,
    pub reference: Option<ReferenceSpec>,
}

pub struct Scenario2d {
    pub name: &'static str,
    pub system: System,
    pub flux: FluxKind,
    pub domain: (f64, f64, f64, f64),
    pub mask: MaskSpec,
    pub bc: Bc2d,
    pub t_end: f64,
    pub default_nx: usize,
    pub default_ny: usize,
    pub limiter: Option<LimiterConfig>,
    pub init: InitFn2d,
    pub exact: Option<ExactFn2d>,
}

pub enum Scenario {
    OneD(Scenario1d),
    TwoD(Scenario2d),
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::OneD(s) => s.name,
            Scenario::TwoD(s) => s.name,
        }
    }
}

pub const SCENARIO_NAMES: [&str; 10] = [
    "advection",
    "burgers_smooth",
    "burgers_sonic",
    "euler_smooth_1d",
    "sod",
    "blast",
    "shu_osher",
    "euler_smooth_2d",
    "double_mach",
    "forward_step",
];

/// Solve u = sin(x - u t) + c by Newton iteration (characteristic form of
/// the Burgers solution with initial data sin + c).
pub fn burgers_exact(x: f64, t: f64, c: f64) -> Result<f64> {
    // characteristics of sin + c cross at t = 1/max(-u0') = 1; past that
    // the Newton iteration would silently pick one branch of the fold
    if t >= 1.0 {
        return Err(SolverError::Domain(format!(
            "Burgers solution with sine data forms a shock at t = 1 (requested t = {t})"
        )));
    }
    let mut u = (x - c * t).sin() + c;
    for _ in 0..200 {
        let phase = x - u * t;
        let f = u - phase.sin() - c;
        let df = 1.0 + t * phase.cos();
        if df.abs() < 1e-12 {
            break;
        }
        let step = f / df;
        u -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    let residual = (u - (x - u * t).sin() - c).abs();
    if residual > 1e-13 {
        return Err(SolverError::Domain(format!(
            "Burgers characteristic solve failed at x={x}, t={t} (residual {residual:.3e}); \
             the solution may have formed a shock"
        )));
    }
    Ok(u)
}

fn scalar(v: f64) -> State {
    let mut s = State::default();
    s[0] = v;
    s
}

/// Post-shock state of a Mach 10 shock moving into quiescent gas
/// (rho=1.4, p=1), rotated so the shock normal makes 60 degrees with the
/// x-axis: (rho, w, v, p) = (8, 8.25 cos 30, -8.25 sin 30, 116.5).
pub fn double_mach_post_shock() -> (f64, f64, f64, f64) {
    let speed = 8.25;
    (
        8.0,
        speed * (std::f64::consts::PI / 6.0).cos(),
        -speed * (std::f64::consts::PI / 6.0).sin(),
        116.5,
    )
}

/// Shock-foot x position at height y and time t for the double Mach setup:
/// the Mach 10 shock travels at speed 10 c0 / cos(30) along x.
pub fn double_mach_shock_x(y: f64, t: f64) -> f64 {
    1.0 / 6.0 + (y + 20.0 * t) / 3.0f64.sqrt()
}

fn double_mach_state(x: f64, y: f64, t: f64) -> State {
    let (rho, w, v, p) = double_mach_post_shock();
    if x < double_mach_shock_x(y, t) {
        primitive_to_conserved_2d(rho, w, v, p, GAMMA).expect("post-shock state is admissible")
    } else {
        primitive_to_conserved_2d(1.4, 0.0, 0.0, 1.0, GAMMA).expect("quiescent state is admissible")
    }
}

/// Look up a built-in scenario by name.
pub fn scenario(name: &str) -> Result<Scenario> {
    let unknown = || SolverError::Lookup {
        name: name.to_string(),
        valid: SCENARIO_NAMES.join(", "),
    };
    match name {
        "advection" => Ok(Scenario::OneD(Scenario1d {
            name: "advection",
            system: System::Advection { speed: 1.0 },
            flux: FluxKind::UpwindLinear,
            domain: (-std::f64::consts::PI, std::f64::consts::PI),
            bc: Bc1d::Periodic,
            t_end: 1.0,
            default_n: 160,
            limiter: None,
            init: Arc::new(|x| scalar(x.sin())),
            exact: Some(Arc::new(|x, t| Ok(scalar((x - t).sin())))),
            reference: None,
        })),
        "burgers_smooth" | "burgers_sonic" => {
            let c = if name == "burgers_smooth" { 2.0 } else { 0.5 };
            Ok(Scenario::OneD(Scenario1d {
                name: if c == 2.0 { "burgers_smooth" } else { "burgers_sonic" },
                system: System::Burgers,
                flux: FluxKind::GodunovBurgers,
                domain: (-std::f64::consts::PI, std::f64::consts::PI),
                bc: Bc1d::Periodic,
                t_end: 0.2,
                default_n: 160,
                limiter: None,
                init: Arc::new(move |x| scalar(x.sin() + c)),
                exact: Some(Arc::new(move |x, t| Ok(scalar(burgers_exact(x, t, c)?)))),
                reference: None,
            }))
        }
        "euler_smooth_1d" => Ok(Scenario::OneD(Scenario1d {
            name: "euler_smooth_1d",
            system: System::Euler1d { gamma: GAMMA },
            flux: FluxKind::LaxFriedrichsLocal,
            domain: (0.0, 1.0),
            bc: Bc1d::Periodic,
            t_end: 10.0,
            default_n: 80,
            limiter: None,
            init: Arc::new(|x| {
                let rho = 1.0 + 0.2 * (2.0 * std::f64::consts::PI * x).sin();
                primitive_to_conserved_1d(rho, 1.0, 1.0, GAMMA).expect("admissible")
            }),
            exact: Some(Arc::new(|x, t| {
                let rho = 1.0 + 0.2 * (2.0 * std::f64::consts::PI * (x - t)).sin();
                primitive_to_conserved_1d(rho, 1.0, 1.0, GAMMA)
            })),
            reference: None,
        })),
        "sod" => {
            let left = Primitive::new(1.0, 0.0, 1.0);
            let right = Primitive::new(0.125, 0.0, 0.1);
            let riemann = solve_riemann(left, right, GAMMA)?;
            Ok(Scenario::OneD(Scenario1d {
                name: "sod",
                system: System::Euler1d { gamma: GAMMA },
                flux: FluxKind::LaxFriedrichsLocal,
                domain: (0.0, 1.0),
                bc: Bc1d::Ends { left: EndBc1d::Outflow, right: EndBc1d::Outflow },
                t_end: 0.2,
                default_n: 100,
                limiter: Some(LimiterConfig {
                    tvb_m: 10.0,
                    variables: LimiterVariables::Characteristic,
                }),
                init: Arc::new(move |x| {
                    let s = if x <= 0.5 { left } else { right };
                    primitive_to_conserved_1d(s.rho, s.u, s.p, GAMMA).expect("admissible")
                }),
                exact: Some(Arc::new(move |x, t| {
                    let q = if t > 0.0 {
                        riemann.sample((x - 0.5) / t)
                    } else if x <= 0.5 {
                        left
                    } else {
                        right
                    };
                    primitive_to_conserved_1d(q.rho, q.u, q.p, GAMMA)
                })),
                reference: None,
            }))
        }
        "blast" => Ok(Scenario::OneD(Scenario1d {
            name: "blast",
            system: System::Euler1d { gamma: GAMMA },
            flux: FluxKind::LaxFriedrichsLocal,
            domain: (0.0, 1.0),
            bc: Bc1d::Ends { left: EndBc1d::Reflective, right: EndBc1d::Reflective },
            t_end: 0.038,
            default_n: 200,
            limiter: Some(LimiterConfig {
                tvb_m: 200.0,
                variables: LimiterVariables::Characteristic,
            }),
            init: Arc::new(|x| {
                let p = if x <= 0.1 {
                    1000.0
                } else if x <= 0.9 {
                    0.01
                } else {
                    100.0
                };
                primitive_to_conserved_1d(1.0, 0.0, p, GAMMA).expect("admissible")
            }),
            exact: None,
            reference: Some(ReferenceSpec { scheme: "rkdg3_ssp", k: 2, cfl: 0.18, refine: 4 }),
        })),
        "shu_osher" => Ok(Scenario::OneD(Scenario1d {
            name: "shu_osher",
            system: System::Euler1d { gamma: GAMMA },
            flux: FluxKind::LaxFriedrichsLocal,
            domain: (-5.0, 5.0),
            bc: Bc1d::Ends {
                left: EndBc1d::Inflow(Arc::new(|_t| {
                    primitive_to_conserved_1d(3.857143, 2.629369, 10.333333, GAMMA)
                        .expect("admissible")
                })),
                right: EndBc1d::Outflow,
            },
            t_end: 1.8,
            default_n: 400,
            limiter: Some(LimiterConfig {
                tvb_m: 300.0,
                variables: LimiterVariables::Characteristic,
            }),
            init: Arc::new(|x| {
                if x <= -4.0 {
                    primitive_to_conserved_1d(3.857143, 2.629369, 10.333333, GAMMA)
                        .expect("admissible")
                } else {
                    let rho = 1.0 + 0.2 * (5.0 * x).sin();
                    primitive_to_conserved_1d(rho, 0.0, 1.0, GAMMA).expect("admissible")
                }
            }),
            exact: None,
            reference: Some(ReferenceSpec { scheme: "rkdg3_ssp", k: 2, cfl: 0.18, refine: 4 }),
        })),
        "euler_smooth_2d" => Ok(Scenario::TwoD(Scenario2d {
            name: "euler_smooth_2d",
            system: System::Euler2d { gamma: GAMMA },
            flux: FluxKind::LaxFriedrichsLocal,
            domain: (0.0, 1.0, 0.0, 1.0),
            mask: MaskSpec::None,
            bc: Bc2d { x: AxisBc2d::Periodic, y: AxisBc2d::Periodic },
            t_end: 0.5,
            default_nx: 40,
            default_ny: 40,
            limiter: None,
            init: Arc::new(|x, y| {
                let rho = 1.0 + 0.2 * (2.0 * std::f64::consts::PI * (x + y)).sin();
                primitive_to_conserved_2d(rho, 0.7, 0.3, 1.0, GAMMA).expect("admissible")
            }),
            exact: Some(Arc::new(|x, y, t| {
                let rho = 1.0 + 0.2 * (2.0 * std::f64::consts::PI * (x + y - t)).sin();
                primitive_to_conserved_2d(rho, 0.7, 0.3, 1.0, GAMMA)
            })),
        })),
        "double_mach" => Ok(Scenario::TwoD(Scenario2d {
            name: "double_mach",
            system: System::Euler2d { gamma: GAMMA },
            flux: FluxKind::LaxFriedrichsLocal,
            domain: (0.0, 4.0, 0.0, 1.0),
            mask: MaskSpec::None,
            bc: Bc2d {
                x: AxisBc2d::Ends {
                    low: EdgeBc2d::Inflow(Arc::new(|t, y| double_mach_state(0.0, y, t))),
                    high: EdgeBc2d::Outflow,
                },
                y: AxisBc2d::Ends {
                    // bottom: post-shock inflow ahead of the wedge tip at
                    // x = 1/6, reflective wall past it
                    low: EdgeBc2d::Custom(Arc::new(|t, x, interior| {
                        if x < 1.0 / 6.0 {
                            double_mach_state(x, 0.0, t)
                        } else {
                            System::Euler2d { gamma: GAMMA }.reflect(interior, 1)
                        }
                    })),
                    // top: exact traveling-shock state
                    high: EdgeBc2d::Inflow(Arc::new(|t, x| double_mach_state(x, 1.0, t))),
                },
            },
            t_end: 0.2,
            default_nx: 480,
            default_ny: 120,
            limiter: Some(LimiterConfig {
                tvb_m: 50.0,
                variables: LimiterVariables::Componentwise,
            }),
            init: Arc::new(|x, y| double_mach_state(x, y, 0.0)),
            exact: None,
        })),
        "forward_step" => Ok(Scenario::TwoD(Scenario2d {
            name: "forward_step",
            system: System::Euler2d { gamma: GAMMA },
            flux: FluxKind::LaxFriedrichsLocal,
            domain: (0.0, 3.0, 0.0, 1.0),
            mask: MaskSpec::ForwardStep,
            bc: Bc2d {
                x: AxisBc2d::Ends {
                    low: EdgeBc2d::Inflow(Arc::new(|_t, _y| {
                        primitive_to_conserved_2d(1.4, 3.0, 0.0, 1.0, GAMMA).expect("admissible")
                    })),
                    high: EdgeBc2d::Outflow,
                },
                y: AxisBc2d::Ends { low: EdgeBc2d::Reflective, high: EdgeBc2d::Reflective },
            },
            t_end: 4.0,
            default_nx: 240,
            default_ny: 80,
            limiter: Some(LimiterConfig {
                tvb_m: 50.0,
                variables: LimiterVariables::Componentwise,
            }),
            init: Arc::new(|_x, _y| {
                primitive_to_conserved_2d(1.4, 3.0, 0.0, 1.0, GAMMA).expect("admissible")
            }),
            exact: None,
        })),
        _ => Err(unknown()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_names_resolve() {
        for name in SCENARIO_NAMES {
            let s = scenario(name).unwrap();
            assert_eq!(s.name(), name);
        }
        assert!(scenario("nosuch").is_err());
    }

    #[test]
    fn burgers_characteristic_solution() {
        // t=0 identity
        for x in [-2.0, 0.0, 1.3] {
            assert!((burgers_exact(x, 0.0, 2.0).unwrap() - (x.sin() + 2.0)).abs() < 1e-14);
        }
        // residual check at positive time
        let u = burgers_exact(0.3, 0.2, 2.0).unwrap();
        assert!((u - (0.3 - u * 0.2).sin() - 2.0).abs() < 1e-13);
        // well past shock formation the characteristic solve must reject
        assert!(burgers_exact(std::f64::consts::PI, 40.0, 0.5).is_err());
    }

    #[test]
    fn smooth_exact_solutions_satisfy_pde() {
        // residual of u_t + f(u)_x by high-order central differences
        let eps = 1e-5;
        for name in ["advection", "burgers_smooth", "euler_smooth_1d"] {
            let Scenario::OneD(s) = scenario(name).unwrap() else { panic!() };
            let exact = s.exact.as_ref().unwrap();
            let (x0, t0) = (0.37, 0.11);
            let d_dt = |comp: usize| -> f64 {
                let stencil = [-2.0, -1.0, 1.0, 2.0];
                let weights = [1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0];
                stencil
                    .iter()
                    .zip(&weights)
                    .map(|(&s_, &w)| w * exact(x0, t0 + s_ * eps).unwrap()[comp])
                    .sum::<f64>()
                    / eps
            };
            let d_dx_flux = |comp: usize| -> f64 {
                let stencil = [-2.0, -1.0, 1.0, 2.0];
                let weights = [1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0];
                stencil
                    .iter()
                    .zip(&weights)
                    .map(|(&s_, &w)| {
                        let u = exact(x0 + s_ * eps, t0).unwrap();
                        w * s.system.flux(&u, 0)[comp]
                    })
                    .sum::<f64>()
                    / eps
            };
            for comp in 0..s.system.n_comp() {
                let residual = d_dt(comp) + d_dx_flux(comp);
                assert!(residual.abs() < 1e-8, "{name} comp {comp}: residual {residual:.3e}");
            }
        }
    }

    #[test]
    fn sod_exact_is_self_similar() {
        let Scenario::OneD(s) = scenario("sod").unwrap() else { panic!() };
        let exact = s.exact.as_ref().unwrap();
        // state depends only on (x - 0.5)/t
        let a = exact(0.5 + 0.3 * 0.1, 0.1).unwrap();
        let b = exact(0.5 + 0.3 * 0.2, 0.2).unwrap();
        for c in 0..3 {
            assert!((a[c] - b[c]).abs() < 1e-12);
        }
    }

    #[test]
    fn double_mach_geometry() {
        // shock foot at the wedge tip at t=0, y=0
        assert!((double_mach_shock_x(0.0, 0.0) - 1.0 / 6.0).abs() < 1e-14);
        // Rankine-Hugoniot: post-shock normal velocity and pressure for a
        // Mach 10 shock into rho=1.4, p=1 (c0=1): u_n = 2(M^2-1)/((g+1)M),
        // p = 1 + 2 g (M^2 - 1)/(g+1), rho = (g+1)M^2/((g-1)M^2+2) rho0
        let m = 10.0f64;
        let g = GAMMA;
        let u_n = 2.0 * (m * m - 1.0) / ((g + 1.0) * m);
        let p = 1.0 + 2.0 * g / (g + 1.0) * (m * m - 1.0);
        let rho = (g + 1.0) * m * m / ((g - 1.0) * m * m + 2.0) * 1.4;
        let (rho_ref, w_ref, v_ref, p_ref) = double_mach_post_shock();
        assert!((rho - rho_ref).abs() < 1e-10);
        assert!((p - p_ref).abs() < 1e-10);
        let speed = (w_ref * w_ref + v_ref * v_ref).sqrt();
        assert!((speed - u_n).abs() < 1e-10, "speed {speed} vs {u_n}");
        // the imposed top trace is continuous in time across the moving
        // shock intersection: states straddling x_s differ, states on the
        // same side agree
        let t = 0.07;
        let xs = double_mach_shock_x(1.0, t);
        let pre = double_mach_state(xs + 1e-9, 1.0, t);
        let post = double_mach_state(xs - 1e-9, 1.0, t);
        assert!((pre[0] - 1.4).abs() < 1e-12);
        assert!((post[0] - 8.0).abs() < 1e-12);
    }

    #[test]
    fn forward_step_uses_masked_mesh() {
        let Scenario::TwoD(s) = scenario("forward_step").unwrap() else { panic!() };
        assert_eq!(s.mask, MaskSpec::ForwardStep);
        let mesh =
            crate::mesh::Mesh2D::new(s.domain, s.default_nx, s.default_ny, s.mask).unwrap();
        // step occupies [0.6, 3] x [0, 0.2]: 192 x 16 cells removed
        assert_eq!(mesh.n_active(), 240 * 80 - 192 * 16);
    }
}
