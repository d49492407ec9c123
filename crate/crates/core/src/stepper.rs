//! Time integration of the semi-discrete DG system du/dt = -div f(u).
//!
//! Steps can run through the Butcher form or, when the scheme provides one,
//! the Shu-Osher form whose forward-Euler structure is where limiters attach.
//! Each stage divergence is assembled once at the highest space level any
//! consumer needs; reduced-space uses are derived by modal truncation, which
//! is exact for the orthonormal basis.

use crate::dg::{Bc1d, Dg1d, Dg2d, SpaceLevel};
use crate::error::{Result, SolverError};
use crate::field::{cell_averages_1d, cell_averages_2d, DGField};
use crate::flux::FluxKind;
use crate::tableau::ExtendedTableau;

const BLOWUP_THRESHOLD: f64 = 1e10;

/// Spatial operator abstraction shared by the 1D and 2D assemblies.
pub trait SpatialOp {
    fn divergence(&self, u: &DGField, level: SpaceLevel, t: f64) -> Result<DGField>;

    /// 1 / dt at CFL 1: max wave speed over cell means divided by the cell
    /// size, summed over directions.
    fn inverse_time_scale(&self, u: &DGField) -> Result<f64>;

    /// Per-step refresh (dissipation coefficient of the global LF flux).
    fn begin_step(&mut self, u: &DGField) -> Result<()> {
        let _ = u;
        Ok(())
    }
}

impl SpatialOp for Dg1d<'_> {
    fn divergence(&self, u: &DGField, level: SpaceLevel, t: f64) -> Result<DGField> {
        Dg1d::divergence(self, u, level, t)
    }

    fn inverse_time_scale(&self, u: &DGField) -> Result<f64> {
        let mut s_max: f64 = 0.0;
        for avg in cell_averages_1d(u, self.mesh) {
            s_max = s_max.max(self.sys.max_wave_speed(&avg, 0)?);
        }
        if !(s_max > 0.0) {
            return Err(SolverError::Domain("zero wave speed, dt undefined".into()));
        }
        Ok(s_max / self.mesh.min_cell_size())
    }

    fn begin_step(&mut self, u: &DGField) -> Result<()> {
        if self.flux == FluxKind::LaxFriedrichsGlobal {
            let mut alpha: f64 = 0.0;
            for avg in cell_averages_1d(u, self.mesh) {
                alpha = alpha.max(self.sys.max_wave_speed(&avg, 0)?);
            }
            self.global_alpha = alpha;
        }
        Ok(())
    }
}

impl SpatialOp for Dg2d<'_> {
    fn divergence(&self, u: &DGField, level: SpaceLevel, t: f64) -> Result<DGField> {
        Dg2d::divergence(self, u, level, t)
    }

    fn inverse_time_scale(&self, u: &DGField) -> Result<f64> {
        let mut sx: f64 = 0.0;
        let mut sy: f64 = 0.0;
        for avg in cell_averages_2d(u, self.mesh) {
            sx = sx.max(self.sys.max_wave_speed(&avg, 0)?);
            sy = sy.max(self.sys.max_wave_speed(&avg, 1)?);
        }
        let scale = sx / self.mesh.hx() + sy / self.mesh.hy();
        if !(scale > 0.0) {
            return Err(SolverError::Domain("zero wave speed, dt undefined".into()));
        }
        Ok(scale)
    }

    fn begin_step(&mut self, u: &DGField) -> Result<()> {
        if self.flux == FluxKind::LaxFriedrichsGlobal {
            let mut alpha: f64 = 0.0;
            for avg in cell_averages_2d(u, self.mesh) {
                alpha = alpha.max(self.sys.max_wave_speed(&avg, 0)?);
                alpha = alpha.max(self.sys.max_wave_speed(&avg, 1)?);
            }
            self.global_alpha = alpha;
        }
        Ok(())
    }
}

/// Post-stage hook, applied to every newly formed stage value together
/// with the stage time (used e.g. for limiting with time-dependent
/// boundary data).
pub type StageHook<'h> = dyn FnMut(&mut DGField, f64) -> Result<()> + 'h;

/// Divergence of one stage value, at the highest level any consumer needs;
/// the reduced view is the exact modal truncation.
struct StageDiv {
    high: Option<DGField>,
    low: Option<DGField>,
}

impl StageDiv {
    fn at(&self, level: SpaceLevel) -> &DGField {
        match level {
            SpaceLevel::High => self.high.as_ref().expect("high divergence not assembled"),
            SpaceLevel::Low => self
                .low
                .as_ref()
                .or(self.high.as_ref())
                .expect("no divergence assembled"),
        }
    }
}

fn stage_divergence<Op: SpatialOp>(
    op: &Op,
    u: &DGField,
    t: f64,
    needs_high: bool,
    needs_low: bool,
) -> Result<StageDiv> {
    if needs_high {
        let high = op.divergence(u, SpaceLevel::High, t)?;
        let low = if needs_low { Some(high.project_down()?) } else { None };
        Ok(StageDiv { high: Some(high), low })
    } else if needs_low {
        Ok(StageDiv { high: None, low: Some(op.divergence(u, SpaceLevel::Low, t)?) })
    } else {
        Ok(StageDiv { high: None, low: None })
    }
}

/// One step in Butcher form.
pub fn butcher_step<Op: SpatialOp>(
    op: &Op,
    tab: &ExtendedTableau,
    u: &DGField,
    t: f64,
    dt: f64,
    hook: Option<&mut StageHook>,
) -> Result<DGField> {
    let s = tab.n_stages();
    let mut hook = hook;
    let mut divs: Vec<StageDiv> = Vec::with_capacity(s);
    let mut stage = u.clone();
    for i in 0..s {
        if i > 0 {
            stage = u.clone();
            for j in 0..i {
                if tab.a[i][j] != 0.0 {
                    stage.axpy(-dt * tab.a[i][j], divs[j].at(tab.d[i][j]));
                }
            }
            if let Some(h) = hook.as_deref_mut() {
                h(&mut stage, t + tab.c[i] * dt)?;
            }
        }
        let mut needs_high = tab.b[i] != 0.0 && tab.e[i] == SpaceLevel::High;
        let mut needs_low = tab.b[i] != 0.0 && tab.e[i] == SpaceLevel::Low;
        for r in (i + 1)..s {
            if tab.a[r][i] != 0.0 {
                match tab.d[r][i] {
                    SpaceLevel::High => needs_high = true,
                    SpaceLevel::Low => needs_low = true,
                }
            }
        }
        divs.push(stage_divergence(op, &stage, t + tab.c[i] * dt, needs_high, needs_low)?);
    }
    let mut next = u.clone();
    for i in 0..s {
        if tab.b[i] != 0.0 {
            next.axpy(-dt * tab.b[i], divs[i].at(tab.e[i]));
        }
    }
    if let Some(h) = hook.as_deref_mut() {
        h(&mut next, t + dt)?;
    }
    Ok(next)
}

/// One step in Shu-Osher form. Errors if the scheme does not provide one.
pub fn shu_osher_step<Op: SpatialOp>(
    op: &Op,
    tab: &ExtendedTableau,
    u: &DGField,
    t: f64,
    dt: f64,
    hook: Option<&mut StageHook>,
) -> Result<DGField> {
    let so = tab.shu_osher.as_ref().ok_or_else(|| {
        SolverError::InvalidArgument(format!("scheme {} has no Shu-Osher form", tab.name))
    })?;
    let s = tab.n_stages();
    let mut hook = hook;
    let mut values: Vec<DGField> = vec![u.clone()];
    let mut divs: Vec<Option<StageDiv>> = (0..s).map(|_| None).collect();
    for i in 0..s {
        // divergence of stage value j at the max level any row needs
        for j in 0..=i {
            if divs[j].is_none() {
                let mut needs_high = false;
                let mut needs_low = false;
                for r in j..s {
                    if so.beta[r][j] != 0.0 {
                        match so.tag[r][j] {
                            SpaceLevel::High => needs_high = true,
                            SpaceLevel::Low => needs_low = true,
                        }
                    }
                }
                if needs_high || needs_low {
                    divs[j] = Some(stage_divergence(
                        op,
                        &values[j],
                        t + tab.c[j] * dt,
                        needs_high,
                        needs_low,
                    )?);
                }
            }
        }
        let mut next = values[0].clone();
        next.scale(so.alpha[i][0]);
        for j in 1..=i {
            if so.alpha[i][j] != 0.0 {
                next.axpy(so.alpha[i][j], &values[j]);
            }
        }
        for j in 0..=i {
            if so.beta[i][j] != 0.0 {
                let d = divs[j].as_ref().expect("divergence assembled above");
                next.axpy(-dt * so.beta[i][j], d.at(so.tag[i][j]));
            }
        }
        if let Some(h) = hook.as_deref_mut() {
            let stage_t = if i + 1 < s { t + tab.c[i + 1] * dt } else { t + dt };
            h(&mut next, stage_t)?;
        }
        values.push(next);
    }
    Ok(values.pop().unwrap())
}

/// Which step routine `advance` uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepRoute {
    Butcher,
    /// Shu-Osher when the scheme provides it, Butcher otherwise.
    ShuOsherPreferred,
}

#[derive(Debug, Clone)]
pub struct StepReport {
    pub n_steps: usize,
    pub t_final: f64,
    pub dt_min: f64,
    pub dt_max: f64,
}

/// March from t0 to t_end at the given CFL number; the final step is clipped
/// to land exactly on t_end.
#[allow(clippy::too_many_arguments)]
pub fn advance<Op: SpatialOp>(
    op: &mut Op,
    tab: &ExtendedTableau,
    u0: &DGField,
    t0: f64,
    t_end: f64,
    cfl: f64,
    route: StepRoute,
    mut hook: Option<&mut StageHook>,
) -> Result<(DGField, StepReport)> {
    if !(cfl > 0.0) {
        return Err(SolverError::InvalidArgument(format!("CFL {cfl} must be positive")));
    }
    if !(t_end > t0) {
        return Err(SolverError::InvalidArgument("t_end must exceed t0".into()));
    }
    let use_shu_osher = route == StepRoute::ShuOsherPreferred && tab.shu_osher.is_some();
    let mut u = u0.clone();
    let mut t = t0;
    let mut report = StepReport { n_steps: 0, t_final: t0, dt_min: f64::INFINITY, dt_max: 0.0 };
    while t < t_end - 1e-14 * (t_end - t0) {
        op.begin_step(&u)?;
        let mut dt = cfl / op.inverse_time_scale(&u)?;
        if t + dt > t_end {
            dt = t_end - t;
        }
        u = if use_shu_osher {
            shu_osher_step(op, tab, &u, t, dt, hook.as_deref_mut())?
        } else {
            butcher_step(op, tab, &u, t, dt, hook.as_deref_mut())?
        };
        t += dt;
        report.n_steps += 1;
        report.dt_min = report.dt_min.min(dt);
        report.dt_max = report.dt_max.max(dt);
        if u.has_nan() || u.max_abs() > BLOWUP_THRESHOLD {
            return Err(SolverError::BlowUp {
                t,
                detail: format!("|u| reached {:.3e} after {} steps", u.max_abs(), report.n_steps),
            });
        }
    }
    report.t_final = t;
    Ok((u, report))
}

/// Convenience: periodic scalar advection operator for tests and analysis.
pub fn advection_op(mesh: &crate::mesh::Mesh1D, speed: f64) -> Dg1d<'_> {
    Dg1d {
        mesh,
        sys: crate::system::System::Advection { speed },
        flux: FluxKind::UpwindLinear,
        bc: Bc1d::Periodic,
        global_alpha: 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{evaluate_1d, project_function_1d, total_mass_1d};
    use crate::mesh::Mesh1D;
    use crate::system::{System, MAX_COMP};
    use crate::tableau::builtin_tableau;
    use std::f64::consts::PI;

    fn advect_error(name: &str, k: usize, n: usize, cfl: f64) -> f64 {
        let mesh = Mesh1D::uniform((-PI, PI), n).unwrap();
        let mut op = advection_op(&mesh, 1.0);
        let tab = builtin_tableau(name).unwrap();
        let u0 = project_function_1d(&mesh, k, 1, |x| [x.sin(), 0.0, 0.0, 0.0]).unwrap();
        let (u, _) =
            advance(&mut op, &tab, &u0, 0.0, 1.0, cfl, StepRoute::Butcher, None).unwrap();
        let mut err: f64 = 0.0;
        let mut out = [0.0; MAX_COMP];
        for j in 0..n {
            for &r in &[-0.7, 0.0, 0.4] {
                evaluate_1d(&u, &mesh, j, r, &mut out).unwrap();
                let x = mesh.to_physical(j, r);
                err = err.max((out[0] - (x - 1.0).sin()).abs());
            }
        }
        err
    }

    #[test]
    fn advection_second_order_schemes_converge() {
        for name in ["rkdg2", "ssprk2_sd", "midpoint_sd"] {
            let e1 = advect_error(name, 1, 20, 0.3);
            let e2 = advect_error(name, 1, 40, 0.3);
            let rate = (e1 / e2).log2();
            assert!(rate > 1.7, "{name}: rate {rate} (e1={e1:.3e}, e2={e2:.3e})");
        }
    }

    #[test]
    fn advection_third_order_schemes_converge() {
        for name in ["rkdg3_ssp", "rkdg3_heun", "heun_sd", "ssprk3_sd"] {
            let e1 = advect_error(name, 2, 20, 0.15);
            let e2 = advect_error(name, 2, 40, 0.15);
            let rate = (e1 / e2).log2();
            assert!(rate > 2.6, "{name}: rate {rate} (e1={e1:.3e}, e2={e2:.3e})");
        }
    }

    #[test]
    fn advection_fourth_order_schemes_converge() {
        for name in ["rkdg4", "rk4_sd"] {
            let e1 = advect_error(name, 3, 10, 0.1);
            let e2 = advect_error(name, 3, 20, 0.1);
            let rate = (e1 / e2).log2();
            assert!(rate > 3.5, "{name}: rate {rate} (e1={e1:.3e}, e2={e2:.3e})");
        }
    }

    #[test]
    fn shu_osher_route_matches_butcher() {
        let mesh = Mesh1D::uniform((-PI, PI), 24).unwrap();
        let mut op = Dg1d {
            mesh: &mesh,
            sys: System::Burgers,
            flux: FluxKind::GodunovBurgers,
            bc: Bc1d::Periodic,
            global_alpha: 0.0,
        };
        let u0 = project_function_1d(&mesh, 2, 1, |x| [x.sin() + 2.0, 0.0, 0.0, 0.0]).unwrap();
        for name in ["rkdg2", "ssprk2_sd", "rkdg3_ssp", "ssprk3_sd"] {
            let tab = builtin_tableau(name).unwrap();
            op.begin_step(&u0).unwrap();
            let dt = 0.2 / op.inverse_time_scale(&u0).unwrap();
            let a = butcher_step(&op, &tab, &u0, 0.0, dt, None).unwrap();
            let b = shu_osher_step(&op, &tab, &u0, 0.0, dt, None).unwrap();
            let mut diff: f64 = 0.0;
            for (x, y) in a.data.iter().zip(&b.data) {
                diff = diff.max((x - y).abs());
            }
            assert!(diff < 1e-13, "{name}: {diff}");
        }
    }

    #[test]
    fn mass_is_conserved() {
        let mesh = Mesh1D::uniform((-PI, PI), 32).unwrap();
        let mut op = Dg1d {
            mesh: &mesh,
            sys: System::Burgers,
            flux: FluxKind::GodunovBurgers,
            bc: Bc1d::Periodic,
            global_alpha: 0.0,
        };
        let u0 = project_function_1d(&mesh, 2, 1, |x| [x.sin() + 0.5, 0.0, 0.0, 0.0]).unwrap();
        let m0 = total_mass_1d(&u0, &mesh)[0];
        let tab = builtin_tableau("ssprk3_sd").unwrap();
        let (u, rep) =
            advance(&mut op, &tab, &u0, 0.0, 0.2, 0.25, StepRoute::ShuOsherPreferred, None)
                .unwrap();
        assert!(rep.n_steps > 1);
        let m1 = total_mass_1d(&u, &mesh)[0];
        assert!((m1 - m0).abs() < 1e-12, "mass drift {}", m1 - m0);
    }

    #[test]
    fn final_step_lands_on_t_end() {
        let mesh = Mesh1D::uniform((-PI, PI), 16).unwrap();
        let mut op = advection_op(&mesh, 1.0);
        let tab = builtin_tableau("rkdg2").unwrap();
        let u0 = project_function_1d(&mesh, 1, 1, |x| [x.sin(), 0.0, 0.0, 0.0]).unwrap();
        let (_, rep) =
            advance(&mut op, &tab, &u0, 0.0, 0.7, 0.3, StepRoute::Butcher, None).unwrap();
        assert!((rep.t_final - 0.7).abs() < 1e-14);
        assert!(rep.dt_min <= rep.dt_max);
    }

    #[test]
    fn unstable_cfl_blows_up() {
        let mesh = Mesh1D::uniform((-PI, PI), 64).unwrap();
        let mut op = advection_op(&mesh, 1.0);
        let tab = builtin_tableau("rkdg2").unwrap();
        let u0 = project_function_1d(&mesh, 1, 1, |x| [x.sin(), 0.0, 0.0, 0.0]).unwrap();
        let err = advance(&mut op, &tab, &u0, 0.0, 10.0, 1.2, StepRoute::Butcher, None)
            .unwrap_err();
        assert!(matches!(err, SolverError::BlowUp { .. }), "{err}");
    }
}
