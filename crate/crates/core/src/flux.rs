//! Numerical fluxes at cell interfaces.
//!
//! All fluxes are evaluated in the convention f_hat(u_int, u_ext) ~ f(u).nu
//! with nu the +1 direction of the face axis; a cell seeing the face from the
//! other side uses the negated value of the same evaluation, so anti-symmetry
//! holds bitwise.

use crate::error::Result;
use crate::system::{State, System, MAX_COMP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FluxKind {
    UpwindLinear,
    LaxFriedrichsGlobal,
    LaxFriedrichsLocal,
    GodunovBurgers,
}

/// 1/2 (f(u_int) + f(u_ext)).nu - alpha/2 (u_ext - u_int), componentwise.
pub fn lax_friedrichs(
    sys: &System,
    u_int: &State,
    u_ext: &State,
    dir: usize,
    alpha: f64,
) -> Result<State> {
    sys.check_admissible(u_int, "lax_friedrichs interior trace")?;
    sys.check_admissible(u_ext, "lax_friedrichs exterior trace")?;
    let fi = sys.flux(u_int, dir);
    let fe = sys.flux(u_ext, dir);
    let mut out = [0.0; MAX_COMP];
    for c in 0..sys.n_comp() {
        out[c] = 0.5 * (fi[c] + fe[c]) - 0.5 * alpha * (u_ext[c] - u_int[c]);
    }
    Ok(out)
}

/// Local dissipation coefficient: max over the two trace states of the
/// characteristic speed bound in direction `dir`.
pub fn local_lf_alpha(sys: &System, u_int: &State, u_ext: &State, dir: usize) -> Result<f64> {
    Ok(sys
        .max_wave_speed(u_int, dir)?
        .max(sys.max_wave_speed(u_ext, dir)?))
}

/// Godunov flux for Burgers: min/max of u^2/2 over the state interval.
pub fn godunov_burgers(u_int: f64, u_ext: f64) -> f64 {
    let g = |u: f64| 0.5 * u * u;
    if u_int <= u_ext {
        // rarefaction case: minimum over [u_int, u_ext]
        if u_int <= 0.0 && 0.0 <= u_ext {
            0.0
        } else {
            g(u_int).min(g(u_ext))
        }
    } else {
        g(u_int).max(g(u_ext))
    }
}

/// Upwind flux for constant-speed linear advection along +1 direction.
pub fn upwind_linear(u_int: f64, u_ext: f64, speed: f64) -> f64 {
    if speed >= 0.0 {
        speed * u_int
    } else {
        speed * u_ext
    }
}

/// Dispatch on the flux kind. `global_alpha` is the precomputed coefficient
/// for the global Lax-Friedrichs variant; ignored otherwise.
pub fn numerical_flux(
    kind: FluxKind,
    sys: &System,
    u_int: &State,
    u_ext: &State,
    dir: usize,
    global_alpha: f64,
) -> Result<State> {
    match kind {
        FluxKind::UpwindLinear => {
            let speed = match sys {
                System::Advection { speed } => *speed,
                _ => 1.0,
            };
            let mut out = [0.0; MAX_COMP];
            out[0] = upwind_linear(u_int[0], u_ext[0], speed);
            Ok(out)
        }
        FluxKind::LaxFriedrichsGlobal => lax_friedrichs(sys, u_int, u_ext, dir, global_alpha),
        FluxKind::LaxFriedrichsLocal => {
            let alpha = local_lf_alpha(sys, u_int, u_ext, dir)?;
            lax_friedrichs(sys, u_int, u_ext, dir, alpha)
        }
        FluxKind::GodunovBurgers => {
            let mut out = [0.0; MAX_COMP];
            out[0] = godunov_burgers(u_int[0], u_ext[0]);
            Ok(out)
        }
    }
}
