//! Run orchestration: configuration resolution, error measurement against
//! exact or cached reference solutions, convergence studies, stability and
//! accuracy report tables, operation-count reports, and CSV output.
//!
//! Every output file starts with `#`-prefixed metadata lines carrying the
//! fully resolved configuration, so any result can be reproduced bit for bit
//! from its own header.

use std::collections::VecDeque;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::dg::{Dg1d, Dg2d, SpaceLevel};
use crate::error::{Result, SolverError};
use crate::field::{
    cell_averages_1d, cell_averages_2d, evaluate_1d, evaluate_2d, project_function_1d,
    project_function_2d, DGField, ModeLayout,
};
use crate::flops;
use crate::limiter::{apply_tvb_1d, apply_tvb_2d, LimiterVariables};
use crate::mesh::{Mesh1D, Mesh2D};
use crate::problems::{scenario, LimiterConfig, Scenario, Scenario1d, Scenario2d, SCENARIO_NAMES};
use crate::quadrature::QuadratureRule;
use crate::stepper::{advance, butcher_step, StageHook, StepReport, StepRoute};
use crate::system::{State, System, MAX_COMP};
use crate::tableau::{builtin_tableau, generic2, generic3, ExtendedTableau, GenericVariant};
use crate::vn::{predicted_error_star, sample_points, SchemeSymbol};

/// How initial data enters the discrete space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    /// L2 projection onto the modal basis.
    Projected,
    /// Collocation at the per-degree sample points.
    Interpolated,
}

/// Step-routine selection in configuration form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteKind {
    /// Shu-Osher form when the scheme provides one, Butcher otherwise.
    ShuOsher,
    Butcher,
}

impl RouteKind {
    pub fn to_route(self) -> StepRoute {
        match self {
            RouteKind::ShuOsher => StepRoute::ShuOsherPreferred,
            RouteKind::Butcher => StepRoute::Butcher,
        }
    }
}

/// One run request; unset fields fall back to scenario and scheme defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub scenario: String,
    /// Built-in scheme name, or "generic2"/"generic3" with `alpha`/`variant`.
    pub scheme: String,
    /// Fully custom scheme; takes precedence over `scheme` when present.
    pub tableau: Option<ExtendedTableau>,
    pub k: Option<usize>,
    pub cfl: Option<f64>,
    pub n: Option<usize>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub t_end: Option<f64>,
    pub tvb_m: Option<f64>,
    pub no_limiter: bool,
    pub init: InitKind,
    pub route: RouteKind,
    /// Random cell-size perturbation fraction (1D meshes only).
    pub perturb: f64,
    pub seed: u64,
    pub alpha: Option<f64>,
    pub variant: Option<GenericVariant>,
    pub out: Option<String>,
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: "advection".into(),
            scheme: "rkdg3_ssp".into(),
            tableau: None,
            k: None,
            cfl: None,
            n: None,
            nx: None,
            ny: None,
            t_end: None,
            tvb_m: None,
            no_limiter: false,
            init: InitKind::Projected,
            route: RouteKind::ShuOsher,
            perturb: 0.0,
            seed: 0,
            alpha: None,
            variant: None,
            out: None,
            workers: default_workers(),
        }
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1).min(8)
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| SolverError::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

/// Build the tableau a config names, including the parametric families.
pub fn resolve_tableau(cfg: &RunConfig) -> Result<ExtendedTableau> {
    if let Some(tab) = &cfg.tableau {
        tab.validate()?;
        return Ok(tab.clone());
    }
    match cfg.scheme.as_str() {
        "generic2" | "generic3" => {
            let alpha = cfg.alpha.ok_or_else(|| {
                SolverError::Config(format!("scheme {} needs alpha", cfg.scheme))
            })?;
            let variant = cfg.variant.ok_or_else(|| {
                SolverError::Config(format!("scheme {} needs variant", cfg.scheme))
            })?;
            if cfg.scheme == "generic2" {
                generic2(alpha, variant)
            } else {
                generic3(alpha, variant)
            }
        }
        name => builtin_tableau(name),
    }
}

/// Default CFL number for a scheme: near the paper run points for smooth
/// problems, slightly backed off for limited shock runs. Unknown schemes
/// fall back to a measured fraction of the stability boundary.
pub fn default_cfl(tab: &ExtendedTableau, k: usize, shock: bool) -> Result<f64> {
    let (smooth_cfl, shock_cfl) = match tab.name.as_str() {
        "rkdg2" => (0.333, 0.3),
        "ssprk2_sd" | "midpoint_sd" => (0.565, 0.56),
        "rkdg3_ssp" | "rkdg3_heun" => (0.209, 0.18),
        "heun_sd" => (0.19, 0.18),
        "ssprk3_sd" => (0.275, 0.27),
        "rkdg4" => (0.145, 0.13),
        "rk4_sd" => (0.213, 0.2),
        _ => {
            let lambda0 = SchemeSymbol::new(k)?.max_cfl(tab)?;
            (0.95 * lambda0, 0.9 * lambda0)
        }
    };
    Ok(if shock { shock_cfl } else { smooth_cfl })
}

/// A config with every free parameter pinned down.
#[derive(Debug, Clone)]
pub struct Resolved {
    /// Copy of the input config with all optional fields filled; this is
    /// what goes into output metadata.
    pub config: RunConfig,
    pub tableau: ExtendedTableau,
    pub k: usize,
    pub cfl: f64,
    pub t_end: f64,
}

/// Resolve a config against its scenario's defaults.
pub fn resolve(cfg: &RunConfig) -> Result<(Scenario, Resolved)> {
    let sc = scenario(&cfg.scenario)?;
    let tableau = resolve_tableau(cfg)?;
    if tableau.order < 2 || tableau.order > 4 {
        return Err(SolverError::Config(format!(
            "scheme order {} outside the supported 2..=4",
            tableau.order
        )));
    }
    let k = cfg.k.unwrap_or(tableau.order - 1);
    let shock = match &sc {
        Scenario::OneD(s) => s.limiter.is_some(),
        Scenario::TwoD(s) => s.limiter.is_some(),
    };
    let cfl = match cfg.cfl {
        Some(v) if v > 0.0 => v,
        Some(v) => return Err(SolverError::Config(format!("cfl {v} must be positive"))),
        None => default_cfl(&tableau, k, shock)?,
    };
    let t_end = match &sc {
        Scenario::OneD(s) => cfg.t_end.unwrap_or(s.t_end),
        Scenario::TwoD(s) => cfg.t_end.unwrap_or(s.t_end),
    };
    let mut full = cfg.clone();
    full.k = Some(k);
    full.cfl = Some(cfl);
    full.t_end = Some(t_end);
    match &sc {
        Scenario::OneD(s) => {
            full.n = Some(cfg.n.unwrap_or(s.default_n));
            full.nx = None;
            full.ny = None;
            if cfg.perturb < 0.0 || cfg.perturb >= 0.5 {
                return Err(SolverError::Config(format!(
                    "perturb {} outside [0, 0.5)",
                    cfg.perturb
                )));
            }
        }
        Scenario::TwoD(s) => {
            full.nx = Some(cfg.nx.unwrap_or(s.default_nx));
            full.ny = Some(cfg.ny.unwrap_or(s.default_ny));
            full.n = None;
            if cfg.perturb != 0.0 {
                return Err(SolverError::Config("2D meshes do not support perturb".into()));
            }
        }
    }
    if full.workers == 0 {
        full.workers = 1;
    }
    Ok((sc, Resolved { config: full, tableau, k, cfl, t_end }))
}

/// Effective limiter for a scenario after config overrides.
pub fn effective_limiter(base: Option<LimiterConfig>, cfg: &RunConfig) -> Option<LimiterConfig> {
    if cfg.no_limiter {
        return None;
    }
    match (base, cfg.tvb_m) {
        (Some(lc), Some(m)) => Some(LimiterConfig { tvb_m: m, ..lc }),
        (some, None) => some,
        (None, Some(_)) => None,
    }
}

fn solve_real(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().cloned().collect();
    let mut x = b.to_vec();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        if m[piv][col].abs() < 1e-14 {
            return Err(SolverError::Domain("singular interpolation matrix".into()));
        }
        m.swap(col, piv);
        x.swap(col, piv);
        for row in (col + 1)..n {
            let f = m[row][col] / m[col][col];
            for c in col..n {
                m[row][c] -= f * m[col][c];
            }
            x[row] -= f * x[col];
        }
    }
    for col in (0..n).rev() {
        x[col] /= m[col][col];
        for row in 0..col {
            x[row] -= m[row][col] * x[col];
        }
    }
    Ok(x)
}

/// Collocation initial data: in each cell the modal coefficients are chosen
/// so the polynomial matches f exactly at the degree-k sample points.
pub fn interpolate_function_1d<F>(mesh: &Mesh1D, k: usize, n_comp: usize, f: F) -> Result<DGField>
where
    F: Fn(f64) -> State,
{
    let points = sample_points(k)?;
    let basis = crate::basis::BasisSet::new(k)?;
    let n_modes = k + 1;
    // reference Vandermonde: row per sample point, column per mode, h = 1
    let vand: Vec<Vec<f64>> = points
        .iter()
        .map(|&r| (0..n_modes).map(|l| basis.eval(l, r, 1.0)).collect())
        .collect();
    let mut field = DGField::zeros(ModeLayout::one_d(k)?, n_comp, mesh.n_cells());
    for j in 0..mesh.n_cells() {
        let h = mesh.cell_size(j);
        let values: Vec<State> = points.iter().map(|&r| f(mesh.to_physical(j, r))).collect();
        for comp in 0..n_comp {
            let rhs: Vec<f64> = values.iter().map(|v| v[comp]).collect();
            // basis carries 1/sqrt(h), so coefficients scale by sqrt(h)
            let coeffs = solve_real(&vand, &rhs)?;
            for (m, &c) in coeffs.iter().enumerate() {
                field.set(j, comp, m, c * h.sqrt());
            }
        }
    }
    Ok(field)
}

/// Quadrature-sampled error norms of component 0 against an exact solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

/// L1/L2/Linf of the component-0 error at 2k+2 Gauss points per cell.
pub fn error_norms_1d<F>(field: &DGField, mesh: &Mesh1D, exact: F) -> Result<ErrorNorms>
where
    F: Fn(f64) -> Result<State>,
{
    let rule = QuadratureRule::gauss_legendre(2 * field.k() + 2)?;
    let mut l1 = 0.0;
    let mut l2 = 0.0;
    let mut linf: f64 = 0.0;
    let mut out = [0.0; MAX_COMP];
    for j in 0..mesh.n_cells() {
        let h = mesh.cell_size(j);
        for (&r, &w) in rule.points.iter().zip(&rule.weights) {
            let x = mesh.to_physical(j, r);
            evaluate_1d(field, mesh, j, r, &mut out)?;
            let e = (out[0] - exact(x)?[0]).abs();
            l1 += 0.5 * w * h * e;
            l2 += 0.5 * w * h * e * e;
            linf = linf.max(e);
        }
    }
    Ok(ErrorNorms { l1, l2: l2.sqrt(), linf })
}

/// 2D analogue over active cells with a tensor Gauss rule.
pub fn error_norms_2d<F>(field: &DGField, mesh: &Mesh2D, exact: F) -> Result<ErrorNorms>
where
    F: Fn(f64, f64) -> Result<State>,
{
    let rule = QuadratureRule::gauss_legendre(2 * field.k() + 2)?;
    let area = mesh.hx() * mesh.hy();
    let mut l1 = 0.0;
    let mut l2 = 0.0;
    let mut linf: f64 = 0.0;
    let mut out = [0.0; MAX_COMP];
    for (a, &(ix, iy)) in mesh.active_cells().iter().enumerate() {
        let (cx, cy) = mesh.cell_center(ix, iy);
        for (&rx, &wx) in rule.points.iter().zip(&rule.weights) {
            for (&ry, &wy) in rule.points.iter().zip(&rule.weights) {
                let x = cx + 0.5 * mesh.hx() * rx;
                let y = cy + 0.5 * mesh.hy() * ry;
                evaluate_2d(field, mesh, a, rx, ry, &mut out)?;
                let e = (out[0] - exact(x, y)?[0]).abs();
                let w = 0.25 * wx * wy * area;
                l1 += w * e;
                l2 += w * e * e;
                linf = linf.max(e);
            }
        }
    }
    Ok(ErrorNorms { l1, l2: l2.sqrt(), linf })
}

/// Worst component-0 error over the per-degree sample points of every cell.
pub fn error_star_1d<F>(field: &DGField, mesh: &Mesh1D, exact: F) -> Result<f64>
where
    F: Fn(f64) -> Result<State>,
{
    let points = sample_points(field.k())?;
    let mut worst: f64 = 0.0;
    let mut out = [0.0; MAX_COMP];
    for j in 0..mesh.n_cells() {
        for &r in &points {
            evaluate_1d(field, mesh, j, r, &mut out)?;
            let x = mesh.to_physical(j, r);
            worst = worst.max((out[0] - exact(x)?[0]).abs());
        }
    }
    Ok(worst)
}

/// Result of marching one 1D configuration to its final time.
pub struct Solved1d {
    pub mesh: Mesh1D,
    pub field: DGField,
    pub report: StepReport,
}

/// March a 1D scenario under a resolved config.
pub fn solve_1d(sc: &Scenario1d, r: &Resolved) -> Result<Solved1d> {
    let n = r.config.n.expect("resolved 1D config has n");
    let mut mesh = Mesh1D::uniform(sc.domain, n)?;
    if r.config.perturb > 0.0 {
        mesh = mesh.perturbed(r.config.perturb, r.config.seed)?;
    }
    let n_comp = sc.system.n_comp();
    let mut u0 = match r.config.init {
        InitKind::Projected => project_function_1d(&mesh, r.k, n_comp, |x| (sc.init)(x))?,
        InitKind::Interpolated => interpolate_function_1d(&mesh, r.k, n_comp, |x| (sc.init)(x))?,
    };
    let mut op = Dg1d {
        mesh: &mesh,
        sys: sc.system,
        flux: sc.flux,
        bc: sc.bc.clone(),
        global_alpha: 0.0,
    };
    let limiter = effective_limiter(sc.limiter, &r.config);
    let sys = sc.system;
    let bc = sc.bc.clone();
    let (tvb_m, tvb_vars) = limiter
        .map(|lc| (lc.tvb_m, lc.variables))
        .unwrap_or((0.0, LimiterVariables::Componentwise));
    let mut hook_fn;
    let hook: Option<&mut StageHook> = if limiter.is_some() {
        hook_fn = |f: &mut DGField, t: f64| -> Result<()> {
            apply_tvb_1d(f, &mesh, &sys, &bc, tvb_m, tvb_vars, t)?;
            Ok(())
        };
        hook_fn(&mut u0, 0.0)?;
        Some(&mut hook_fn)
    } else {
        None
    };
    let (field, report) = advance(
        &mut op,
        &r.tableau,
        &u0,
        0.0,
        r.t_end,
        r.cfl,
        r.config.route.to_route(),
        hook,
    )?;
    Ok(Solved1d { mesh, field, report })
}

/// Result of marching one 2D configuration to its final time.
pub struct Solved2d {
    pub mesh: Mesh2D,
    pub field: DGField,
    pub report: StepReport,
}

/// March a 2D scenario under a resolved config.
pub fn solve_2d(sc: &Scenario2d, r: &Resolved) -> Result<Solved2d> {
    let nx = r.config.nx.expect("resolved 2D config has nx");
    let ny = r.config.ny.expect("resolved 2D config has ny");
    let mesh = Mesh2D::new(sc.domain, nx, ny, sc.mask)?;
    let n_comp = sc.system.n_comp();
    if r.config.init == InitKind::Interpolated {
        return Err(SolverError::Config("interpolated init is 1D-only".into()));
    }
    let mut u0 = project_function_2d(&mesh, r.k, n_comp, |x, y| (sc.init)(x, y))?;
    let mut op = Dg2d {
        mesh: &mesh,
        sys: sc.system,
        flux: sc.flux,
        bc: sc.bc.clone(),
        global_alpha: 0.0,
    };
    let limiter = effective_limiter(sc.limiter, &r.config);
    let sys = sc.system;
    let bc = sc.bc.clone();
    let (tvb_m, tvb_vars) = limiter
        .map(|lc| (lc.tvb_m, lc.variables))
        .unwrap_or((0.0, LimiterVariables::Componentwise));
    let mut hook_fn;
    let hook: Option<&mut StageHook> = if limiter.is_some() {
        hook_fn = |f: &mut DGField, t: f64| -> Result<()> {
            apply_tvb_2d(f, &mesh, &sys, &bc, tvb_m, tvb_vars, t)?;
            Ok(())
        };
        hook_fn(&mut u0, 0.0)?;
        Some(&mut hook_fn)
    } else {
        None
    };
    let (field, report) = advance(
        &mut op,
        &r.tableau,
        &u0,
        0.0,
        r.t_end,
        r.cfl,
        r.config.route.to_route(),
        hook,
    )?;
    Ok(Solved2d { mesh, field, report })
}

/// Summary of one `run` invocation.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub n_steps: usize,
    pub t_final: f64,
    pub norms: Option<ErrorNorms>,
    pub eps_star: Option<f64>,
    pub files: Vec<PathBuf>,
}

fn fmt(v: f64) -> String {
    format!("{v:e}")
}

/// Write a CSV file: `#` metadata lines, a header row, then data rows.
pub fn write_csv(path: &Path, meta: &[String], header: &str, rows: &[String]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut text = String::new();
    for m in meta {
        text.push_str("# ");
        text.push_str(m);
        text.push('\n');
    }
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn config_meta(kind: &str, r: &Resolved) -> Vec<String> {
    vec![format!("sdrkdg {kind}"), format!("config {}", r.config.to_json())]
}

fn snapshot_header_1d(sys: &System, n_modes: usize) -> String {
    let n_comp = sys.n_comp();
    let mut cols = vec!["x".to_string()];
    for c in 0..n_comp {
        cols.push(format!("avg{c}"));
    }
    if matches!(sys, System::Euler1d { .. }) {
        cols.extend(["rho", "w", "p"].map(String::from));
    }
    for c in 0..n_comp {
        for m in 0..n_modes {
            cols.push(format!("c{c}m{m}"));
        }
    }
    cols.join(",")
}

fn write_snapshot_1d(path: &Path, meta: &[String], s: &Solved1d, sys: &System) -> Result<()> {
    let n_comp = sys.n_comp();
    let n_modes = s.field.n_modes();
    let avgs = cell_averages_1d(&s.field, &s.mesh);
    let mut rows = Vec::with_capacity(s.mesh.n_cells());
    for j in 0..s.mesh.n_cells() {
        let mut cols = vec![fmt(s.mesh.cell_center(j))];
        for c in 0..n_comp {
            cols.push(fmt(avgs[j][c]));
        }
        if let System::Euler1d { gamma } = sys {
            let (rho, w, p) = crate::system::conserved_to_primitive_1d(&avgs[j], *gamma)?;
            cols.extend([fmt(rho), fmt(w), fmt(p)]);
        }
        for c in 0..n_comp {
            for m in 0..n_modes {
                cols.push(fmt(s.field.get(j, c, m)));
            }
        }
        rows.push(cols.join(","));
    }
    write_csv(path, meta, &snapshot_header_1d(sys, n_modes), &rows)
}

fn write_snapshot_2d(path: &Path, meta: &[String], s: &Solved2d, sys: &System) -> Result<()> {
    let n_comp = sys.n_comp();
    let n_modes = s.field.n_modes();
    let avgs = cell_averages_2d(&s.field, &s.mesh);
    let mut cols = vec!["x".to_string(), "y".to_string()];
    for c in 0..n_comp {
        cols.push(format!("avg{c}"));
    }
    for c in 0..n_comp {
        for m in 0..n_modes {
            cols.push(format!("c{c}m{m}"));
        }
    }
    let mut rows = Vec::with_capacity(s.mesh.n_active());
    for (a, &(ix, iy)) in s.mesh.active_cells().iter().enumerate() {
        let (x, y) = s.mesh.cell_center(ix, iy);
        let mut row = vec![fmt(x), fmt(y)];
        for c in 0..n_comp {
            row.push(fmt(avgs[a][c]));
        }
        for c in 0..n_comp {
            for m in 0..n_modes {
                row.push(fmt(s.field.get(a, c, m)));
            }
        }
        rows.push(row.join(","));
    }
    write_csv(path, meta, &cols.join(","), &rows)
}

fn write_contour_2d(path: &Path, meta: &[String], s: &Solved2d) -> Result<()> {
    let avgs = cell_averages_2d(&s.field, &s.mesh);
    let rows: Vec<String> = s
        .mesh
        .active_cells()
        .iter()
        .enumerate()
        .map(|(a, &(ix, iy))| {
            let (x, y) = s.mesh.cell_center(ix, iy);
            format!("{},{},{}", fmt(x), fmt(y), fmt(avgs[a][0]))
        })
        .collect();
    write_csv(path, meta, "x,y,value", &rows)
}

/// Run one scenario and write solution snapshots.
pub fn run_scenario(cfg: &RunConfig) -> Result<RunSummary> {
    let (sc, r) = resolve(cfg)?;
    let out_dir = PathBuf::from(r.config.out.clone().unwrap_or_else(|| "out".into()));
    let meta = config_meta("run", &r);
    match sc {
        Scenario::OneD(s) => {
            let solved = solve_1d(&s, &r)?;
            let t = r.t_end;
            let norms = match &s.exact {
                Some(e) => Some(error_norms_1d(&solved.field, &solved.mesh, |x| e(x, t))?),
                None => None,
            };
            let eps_star = match &s.exact {
                Some(e) => Some(error_star_1d(&solved.field, &solved.mesh, |x| e(x, t))?),
                None => None,
            };
            let path = out_dir.join(format!(
                "{}_{}_n{}.csv",
                s.name,
                r.tableau.name,
                r.config.n.unwrap()
            ));
            write_snapshot_1d(&path, &meta, &solved, &s.system)?;
            Ok(RunSummary {
                n_steps: solved.report.n_steps,
                t_final: solved.report.t_final,
                norms,
                eps_star,
                files: vec![path],
            })
        }
        Scenario::TwoD(s) => {
            let solved = solve_2d(&s, &r)?;
            let t = r.t_end;
            let norms = match &s.exact {
                Some(e) => Some(error_norms_2d(&solved.field, &solved.mesh, |x, y| e(x, y, t))?),
                None => None,
            };
            let stem = format!(
                "{}_{}_n{}x{}",
                s.name,
                r.tableau.name,
                r.config.nx.unwrap(),
                r.config.ny.unwrap()
            );
            let snap = out_dir.join(format!("{stem}.csv"));
            let contour = out_dir.join(format!("{stem}_contour.csv"));
            write_snapshot_2d(&snap, &meta, &solved, &s.system)?;
            write_contour_2d(&contour, &meta, &solved)?;
            Ok(RunSummary {
                n_steps: solved.report.n_steps,
                t_final: solved.report.t_final,
                norms,
                eps_star: None,
                files: vec![snap, contour],
            })
        }
    }
}

/// One mesh level of a convergence study.
#[derive(Debug, Clone)]
pub struct ErrorRow {
    pub n: usize,
    pub norms: ErrorNorms,
    pub eps_star: Option<f64>,
    pub predicted: Option<f64>,
    pub order_l1: Option<f64>,
    pub order_l2: Option<f64>,
    pub order_linf: Option<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct ErrorReport {
    pub rows: Vec<ErrorRow>,
}

impl ErrorReport {
    /// L2 order between the two finest meshes.
    pub fn finest_order_l2(&self) -> Option<f64> {
        self.rows.last().and_then(|r| r.order_l2)
    }

    pub fn to_rows(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(fmt).unwrap_or_default();
        self.rows
            .iter()
            .map(|r| {
                [
                    r.n.to_string(),
                    fmt(r.norms.l1),
                    opt(r.order_l1),
                    fmt(r.norms.l2),
                    opt(r.order_l2),
                    fmt(r.norms.linf),
                    opt(r.order_linf),
                    opt(r.eps_star),
                    opt(r.predicted),
                ]
                .join(",")
            })
            .collect()
    }
}

pub const ERROR_REPORT_HEADER: &str =
    "n,l1,order_l1,l2,order_l2,linf,order_linf,eps_star,predicted";

/// Observed order between consecutive mesh levels:
/// log(err_prev / err_cur) / log(n_cur / n_prev).
pub fn observed_orders(series: &[(usize, f64)]) -> Vec<Option<f64>> {
    let mut out = vec![None];
    for w in series.windows(2) {
        let ((n0, e0), (n1, e1)) = (w[0], w[1]);
        if e0 > 0.0 && e1 > 0.0 {
            out.push(Some((e0 / e1).ln() / (n1 as f64 / n0 as f64).ln()));
        } else {
            out.push(None);
        }
    }
    out
}

/// Run `f` over `items` on up to `workers` threads, preserving order.
pub fn parallel_map<T, R, F>(items: Vec<T>, workers: usize, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync,
{
    let n = items.len();
    let workers = workers.max(1).min(n.max(1));
    let queue: Mutex<VecDeque<(usize, T)>> = Mutex::new(items.into_iter().enumerate().collect());
    let results: Mutex<Vec<Option<R>>> = Mutex::new((0..n).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let item = queue.lock().unwrap().pop_front();
                let Some((i, t)) = item else { break };
                let r = f(t);
                results.lock().unwrap()[i] = Some(r);
            });
        }
    });
    results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("worker filled every slot"))
        .collect()
}

/// Errors across a mesh refinement ladder, with observed orders.
pub fn convergence_study(cfg: &RunConfig, meshes: &[usize]) -> Result<ErrorReport> {
    if meshes.len() < 2 {
        return Err(SolverError::Config("convergence study needs >= 2 meshes".into()));
    }
    type MeshResult = Result<(usize, ErrorNorms, Option<f64>, Option<f64>)>;
    let per_mesh = parallel_map(meshes.to_vec(), cfg.workers.max(1), |n| -> MeshResult {
        let mut c = cfg.clone();
        let (sc, r) = resolve(cfg)?;
        match sc {
            Scenario::OneD(s) => {
                c.n = Some(n);
                let (_, r) = resolve(&c)?;
                let solved = solve_1d(&s, &r)?;
                let exact = s.exact.as_ref().ok_or_else(|| {
                    SolverError::Config(format!("{} has no exact solution", s.name))
                })?;
                let t = r.t_end;
                let norms = error_norms_1d(&solved.field, &solved.mesh, |x| exact(x, t))?;
                let eps = error_star_1d(&solved.field, &solved.mesh, |x| exact(x, t))?;
                let predicted = if s.name == "advection" && r.config.perturb == 0.0 {
                    Some(predicted_error_star(&r.tableau, r.k, r.cfl, n, t)?)
                } else {
                    None
                };
                Ok((n, norms, Some(eps), predicted))
            }
            Scenario::TwoD(s) => {
                // scale both directions by the requested x-resolution
                c.nx = Some(n);
                c.ny = Some((n * s.default_ny).div_ceil(s.default_nx));
                let (_, r2) = resolve(&c)?;
                let solved = solve_2d(&s, &r2)?;
                let exact = s.exact.as_ref().ok_or_else(|| {
                    SolverError::Config(format!("{} has no exact solution", s.name))
                })?;
                let t = r.t_end;
                let norms = error_norms_2d(&solved.field, &solved.mesh, |x, y| exact(x, y, t))?;
                Ok((n, norms, None, None))
            }
        }
    });
    let mut rows = Vec::new();
    for res in per_mesh {
        let (n, norms, eps, predicted) = res?;
        rows.push(ErrorRow {
            n,
            norms,
            eps_star: eps,
            predicted,
            order_l1: None,
            order_l2: None,
            order_linf: None,
        });
    }
    let l1: Vec<_> = rows.iter().map(|r| (r.n, r.norms.l1)).collect();
    let l2: Vec<_> = rows.iter().map(|r| (r.n, r.norms.l2)).collect();
    let linf: Vec<_> = rows.iter().map(|r| (r.n, r.norms.linf)).collect();
    for (i, row) in rows.iter_mut().enumerate() {
        row.order_l1 = observed_orders(&l1)[i];
        row.order_l2 = observed_orders(&l2)[i];
        row.order_linf = observed_orders(&linf)[i];
    }
    if let Some(out) = &cfg.out {
        let (_, r) = resolve(cfg)?;
        let path = PathBuf::from(out).join(format!(
            "converge_{}_{}.csv",
            cfg.scenario, r.tableau.name
        ));
        write_csv(&path, &config_meta("converge", &r), ERROR_REPORT_HEADER, &ErrorReport {
            rows: rows.clone(),
        }
        .to_rows())?;
    }
    Ok(ErrorReport { rows })
}

/// One scheme's maximum stable CFL number.
#[derive(Debug, Clone)]
pub struct CflRow {
    pub scheme: String,
    pub k: usize,
    pub lambda0: f64,
}

/// Maximum stable CFL for every built-in scheme at its natural degree.
pub fn cfl_table(workers: usize) -> Result<Vec<CflRow>> {
    let names: Vec<&str> = crate::tableau::BUILTIN_NAMES.to_vec();
    let rows = parallel_map(names, workers, |name| -> Result<CflRow> {
        let tab = builtin_tableau(name)?;
        let k = tab.order - 1;
        let lambda0 = SchemeSymbol::new(k)?.max_cfl(&tab)?;
        Ok(CflRow { scheme: name.to_string(), k, lambda0 })
    });
    rows.into_iter().collect()
}

/// Predicted-vs-numeric advection errors for one scheme at one CFL.
#[derive(Debug, Clone)]
pub struct PredictionRow {
    pub lambda: f64,
    pub n: usize,
    pub predicted: f64,
    /// Measured sample-point error; infinite when the run blew up.
    pub numeric: f64,
}

pub const PREDICTION_NS: [usize; 6] = [20, 40, 80, 160, 320, 640];

/// Measured worst sample-point advection error at time 1 with collocation
/// initial data, the setting the fully discrete prediction models.
pub fn numeric_error_star(tab: &ExtendedTableau, k: usize, lambda: f64, n: usize) -> Result<f64> {
    let cfg = RunConfig {
        scenario: "advection".into(),
        tableau: Some(tab.clone()),
        k: Some(k),
        cfl: Some(lambda),
        n: Some(n),
        init: InitKind::Interpolated,
        route: RouteKind::Butcher,
        ..RunConfig::default()
    };
    let (sc, r) = resolve(&cfg)?;
    let Scenario::OneD(s) = sc else { unreachable!("advection is 1D") };
    let solved = solve_1d(&s, &r)?;
    let exact = s.exact.as_ref().expect("advection has an exact solution");
    error_star_1d(&solved.field, &solved.mesh, |x| exact(x, r.t_end))
}

/// Predicted and measured errors for one scheme across the mesh ladder and
/// a set of CFL numbers (defaults: crawl value, run value, near-boundary).
pub fn prediction_table(
    tab: &ExtendedTableau,
    k: usize,
    lambdas: &[f64],
    workers: usize,
) -> Result<Vec<PredictionRow>> {
    let t_end = 1.0;
    let mut jobs = Vec::new();
    for &lambda in lambdas {
        for &n in &PREDICTION_NS {
            jobs.push((lambda, n));
        }
    }
    let rows = parallel_map(jobs, workers, |(lambda, n)| -> Result<PredictionRow> {
        let predicted = predicted_error_star(tab, k, lambda, n, t_end)?;
        let numeric = match numeric_error_star(tab, k, lambda, n) {
            Ok(v) => v,
            Err(SolverError::BlowUp { .. }) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        Ok(PredictionRow { lambda, n, predicted, numeric })
    });
    rows.into_iter().collect()
}

/// Default CFL set for a prediction table: a tiny value where the spatial
/// error dominates, the run value, and the stability boundary rounded down.
pub fn prediction_lambdas(tab: &ExtendedTableau, k: usize) -> Result<Vec<f64>> {
    let run = default_cfl(tab, k, false)?;
    let lambda0 = SchemeSymbol::new(k)?.max_cfl(tab)?;
    let near = (lambda0 * 1000.0).floor() / 1000.0;
    let mut set = vec![0.001, run, near];
    set.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    Ok(set)
}

/// Measured multiply-add ratios between reduced and full divergence levels.
#[derive(Debug, Clone)]
pub struct FlopRow {
    pub label: String,
    pub measured: f64,
    pub theoretical: f64,
}

fn count_flops<F: FnOnce() -> Result<()>>(f: F) -> Result<u64> {
    flops::reset();
    f()?;
    Ok(flops::get())
}

/// Reduced-over-full operation ratios for (k, d) pairs, plus the full-step
/// cost of the two-stage reduced scheme relative to its standard twin.
pub fn flop_report() -> Result<Vec<FlopRow>> {
    let mut rows = Vec::new();
    // 1D levels
    for k in [1usize, 2] {
        let mesh = Mesh1D::uniform((-std::f64::consts::PI, std::f64::consts::PI), 128)?;
        let op = crate::stepper::advection_op(&mesh, 1.0);
        let u = project_function_1d(&mesh, k, 1, |x| [x.sin(), 0.0, 0.0, 0.0])?;
        let low = count_flops(|| op.divergence(&u, SpaceLevel::Low, 0.0).map(|_| ()))?;
        let high = count_flops(|| op.divergence(&u, SpaceLevel::High, 0.0).map(|_| ()))?;
        rows.push(FlopRow {
            label: format!("divergence k={k} d=1"),
            measured: low as f64 / high as f64,
            theoretical: k as f64 / (1 + k) as f64,
        });
    }
    // 2D level, k = 2
    {
        let k = 2usize;
        let mesh = Mesh2D::new((0.0, 1.0, 0.0, 1.0), 24, 24, crate::mesh::MaskSpec::None)?;
        let sys = System::Euler2d { gamma: crate::problems::GAMMA };
        let op = Dg2d {
            mesh: &mesh,
            sys,
            flux: crate::flux::FluxKind::LaxFriedrichsLocal,
            bc: crate::dg::Bc2d {
                x: crate::dg::AxisBc2d::Periodic,
                y: crate::dg::AxisBc2d::Periodic,
            },
            global_alpha: 0.0,
        };
        let u = project_function_2d(&mesh, k, sys.n_comp(), |x, y| {
            let rho = 1.0 + 0.2 * (2.0 * std::f64::consts::PI * (x + y)).sin();
            crate::system::primitive_to_conserved_2d(rho, 0.7, 0.3, 1.0, crate::problems::GAMMA)
                .expect("admissible")
        })?;
        let low = count_flops(|| op.divergence(&u, SpaceLevel::Low, 0.0).map(|_| ()))?;
        let high = count_flops(|| op.divergence(&u, SpaceLevel::High, 0.0).map(|_| ()))?;
        rows.push(FlopRow {
            label: "divergence k=2 d=2".into(),
            measured: low as f64 / high as f64,
            theoretical: k as f64 / (2 + k) as f64,
        });
    }
    // full-step comparison of the two-stage pair at k = 1
    {
        let mesh = Mesh1D::uniform((-std::f64::consts::PI, std::f64::consts::PI), 128)?;
        let op = crate::stepper::advection_op(&mesh, 1.0);
        let u = project_function_1d(&mesh, 1, 1, |x| [x.sin(), 0.0, 0.0, 0.0])?;
        let dt = 0.3 * mesh.min_cell_size();
        let reduced = builtin_tableau("midpoint_sd")?;
        let full = builtin_tableau("rkdg2")?;
        let a = count_flops(|| butcher_step(&op, &reduced, &u, 0.0, dt, None).map(|_| ()))?;
        let b = count_flops(|| butcher_step(&op, &full, &u, 0.0, dt, None).map(|_| ()))?;
        rows.push(FlopRow {
            label: "full step midpoint_sd/rkdg2 k=1 d=1".into(),
            measured: a as f64 / b as f64,
            theoretical: 0.75,
        });
    }
    Ok(rows)
}

static REF_LOCK: Mutex<()> = Mutex::new(());
static REF_SERIAL: AtomicUsize = AtomicUsize::new(0);

/// Relative L1 density gap between a solved coarse run and the scenario's
/// cached fine-mesh reference (coarse cell averages against the aggregated
/// fine-cell averages, which is exact on nested uniform meshes).
pub fn reference_density_gap(sc: &Scenario1d, solved: &Solved1d, cache_dir: &Path) -> Result<f64> {
    let spec = sc.reference.as_ref().ok_or_else(|| {
        SolverError::Config(format!("{} has no reference run recipe", sc.name))
    })?;
    let n_coarse = solved.mesh.n_cells();
    let n_fine = n_coarse * spec.refine;
    let fingerprint = format!(
        "ref scenario={} scheme={} k={} cfl={} n={} t_end={}",
        sc.name, spec.scheme, spec.k, spec.cfl, n_fine, sc.t_end
    );
    let path = cache_dir.join(format!("ref_{}_n{}.csv", sc.name, n_fine));
    let fine_rho = {
        let _guard = REF_LOCK.lock().unwrap();
        match load_reference(&path, &fingerprint, n_fine) {
            Some(v) => v,
            None => {
                let v = compute_reference(sc, spec, n_fine)?;
                store_reference(&path, &fingerprint, sc, &v)?;
                v
            }
        }
    };
    let coarse = cell_averages_1d(&solved.field, &solved.mesh);
    let h = solved.mesh.cell_size(0);
    let mut gap = 0.0;
    let mut norm = 0.0;
    for j in 0..n_coarse {
        let agg: f64 =
            fine_rho[j * spec.refine..(j + 1) * spec.refine].iter().sum::<f64>() / spec.refine as f64;
        gap += (coarse[j][0] - agg).abs() * h;
        norm += agg.abs() * h;
    }
    Ok(gap / norm)
}

fn load_reference(path: &Path, fingerprint: &str, n_fine: usize) -> Option<Vec<f64>> {
    let text = std::fs::read_to_string(path).ok()?;
    let mut lines = text.lines();
    let head = lines.next()?;
    if head.strip_prefix("# ") != Some(fingerprint) {
        return None;
    }
    let _header = lines.next()?;
    let rho: Vec<f64> = lines
        .filter_map(|l| l.split(',').nth(1))
        .map(|v| v.parse().ok())
        .collect::<Option<Vec<f64>>>()?;
    (rho.len() == n_fine).then_some(rho)
}

fn compute_reference(
    sc: &Scenario1d,
    spec: &crate::problems::ReferenceSpec,
    n_fine: usize,
) -> Result<Vec<f64>> {
    let cfg = RunConfig {
        scenario: sc.name.into(),
        scheme: spec.scheme.into(),
        k: Some(spec.k),
        cfl: Some(spec.cfl),
        n: Some(n_fine),
        t_end: Some(sc.t_end),
        ..RunConfig::default()
    };
    let (_, r) = resolve(&cfg)?;
    let solved = solve_1d(sc, &r)?;
    Ok(cell_averages_1d(&solved.field, &solved.mesh)
        .iter()
        .map(|a| a[0])
        .collect())
}

fn store_reference(path: &Path, fingerprint: &str, sc: &Scenario1d, rho: &[f64]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut text = format!("# {fingerprint}\nx,rho\n");
    let mesh = Mesh1D::uniform(sc.domain, rho.len())?;
    for (j, v) in rho.iter().enumerate() {
        text.push_str(&format!("{},{}\n", fmt(mesh.cell_center(j)), fmt(*v)));
    }
    // single-writer: land the file atomically via a unique temp name
    let serial = REF_SERIAL.fetch_add(1, Ordering::Relaxed);
    let tmp = path.with_extension(format!("tmp{}.{serial}", std::process::id()));
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// All scenario names, for CLI listings.
pub fn list_scenarios() -> Vec<&'static str> {
    SCENARIO_NAMES.to_vec()
}

/// All built-in scheme names plus the parametric family entry points.
pub fn list_schemes() -> Vec<&'static str> {
    let mut v = crate::tableau::BUILTIN_NAMES.to_vec();
    v.push("generic2");
    v.push("generic3");
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn temp_dir(tag: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("sdrkdg_test_{tag}_{}", std::process::id()));
        std::fs::create_dir_all(&d).unwrap();
        d
    }

    #[test]
    fn config_rejects_unknown_keys() {
        let err = RunConfig::from_json(r#"{"scenario":"advection","bogus":1}"#).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let ok = RunConfig::from_json(r#"{"scenario":"sod","scheme":"ssprk2_sd","cfl":0.5}"#)
            .unwrap();
        assert_eq!(ok.scenario, "sod");
        assert_eq!(ok.cfl, Some(0.5));
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = RunConfig {
            scenario: "burgers_smooth".into(),
            scheme: "generic2".into(),
            alpha: Some(0.8),
            variant: Some(GenericVariant::V1),
            ..RunConfig::default()
        };
        let back = RunConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back.scheme, "generic2");
        assert_eq!(back.alpha, Some(0.8));
        assert_eq!(back.variant, Some(GenericVariant::V1));
    }

    #[test]
    fn resolve_fills_defaults() {
        let cfg = RunConfig { scenario: "advection".into(), scheme: "rkdg3_ssp".into(), ..RunConfig::default() };
        let (_, r) = resolve(&cfg).unwrap();
        assert_eq!(r.k, 2);
        assert!((r.cfl - 0.209).abs() < 1e-12);
        assert_eq!(r.config.n, Some(160));
        assert_eq!(r.t_end, 1.0);
        // shock scenario backs the CFL off
        let cfg = RunConfig { scenario: "sod".into(), scheme: "ssprk2_sd".into(), ..RunConfig::default() };
        let (_, r) = resolve(&cfg).unwrap();
        assert!((r.cfl - 0.56).abs() < 1e-12);
    }

    #[test]
    fn custom_tableau_takes_precedence() {
        let tab = builtin_tableau("ssprk2_sd").unwrap();
        let cfg = RunConfig { tableau: Some(tab), scheme: "rkdg4".into(), ..RunConfig::default() };
        let (_, r) = resolve(&cfg).unwrap();
        assert_eq!(r.tableau.name, "ssprk2_sd");
        assert_eq!(r.k, 1);
    }

    #[test]
    fn interpolation_matches_at_sample_points() {
        let mesh = Mesh1D::uniform((-1.0, 3.0), 7).unwrap();
        for k in 1..=4 {
            let f = |x: f64| [x.sin() + 0.3 * x, 0.0, 0.0, 0.0];
            let field = interpolate_function_1d(&mesh, k, 1, f).unwrap();
            let points = sample_points(k).unwrap();
            let mut out = [0.0; MAX_COMP];
            for j in 0..mesh.n_cells() {
                for &r in &points {
                    evaluate_1d(&field, &mesh, j, r, &mut out).unwrap();
                    let want = f(mesh.to_physical(j, r))[0];
                    assert!((out[0] - want).abs() < 1e-12, "k={k}: {} vs {want}", out[0]);
                }
            }
        }
    }

    #[test]
    fn norms_vanish_on_exactly_representable_data() {
        let mesh = Mesh1D::uniform((0.0, 2.0), 5).unwrap();
        let field = project_function_1d(&mesh, 2, 1, |x| [1.0 + 0.5 * x, 0.0, 0.0, 0.0]).unwrap();
        let norms =
            error_norms_1d(&field, &mesh, |x| Ok([1.0 + 0.5 * x, 0.0, 0.0, 0.0])).unwrap();
        assert!(norms.l1 < 1e-13 && norms.l2 < 1e-13 && norms.linf < 1e-13);
    }

    #[test]
    fn observed_order_recovers_synthetic_rate() {
        let p = 2.73;
        let series: Vec<(usize, f64)> =
            [20, 40, 80, 160].iter().map(|&n| (n, 5.0 * (n as f64).powf(-p))).collect();
        let orders = observed_orders(&series);
        assert!(orders[0].is_none());
        for o in &orders[1..] {
            assert!((o.unwrap() - p).abs() < 1e-10);
        }
    }

    #[test]
    fn parallel_map_preserves_order() {
        let out = parallel_map((0..37).collect(), 5, |i: i32| i * i);
        assert_eq!(out, (0..37).map(|i| i * i).collect::<Vec<_>>());
    }

    #[test]
    fn run_is_deterministic() {
        let dir_a = temp_dir("det_a");
        let dir_b = temp_dir("det_b");
        let mut cfg = RunConfig {
            scenario: "advection".into(),
            scheme: "ssprk2_sd".into(),
            n: Some(20),
            perturb: 0.15,
            seed: 42,
            ..RunConfig::default()
        };
        cfg.out = Some(dir_a.to_string_lossy().into_owned());
        let a = run_scenario(&cfg).unwrap();
        cfg.out = Some(dir_b.to_string_lossy().into_owned());
        let b = run_scenario(&cfg).unwrap();
        let bytes_a = std::fs::read(&a.files[0]).unwrap();
        let bytes_b = std::fs::read(&b.files[0]).unwrap();
        // metadata differs only in the out path; compare data payloads
        let strip = |v: &[u8]| {
            String::from_utf8_lossy(v)
                .lines()
                .filter(|l| !l.starts_with('#'))
                .collect::<Vec<_>>()
                .join("\n")
        };
        assert_eq!(strip(&bytes_a), strip(&bytes_b));
        std::fs::remove_dir_all(dir_a).ok();
        std::fs::remove_dir_all(dir_b).ok();
    }

    #[test]
    fn convergence_study_shows_second_order_advection() {
        let cfg = RunConfig {
            scenario: "advection".into(),
            scheme: "ssprk2_sd".into(),
            cfl: Some(0.3),
            ..RunConfig::default()
        };
        let report = convergence_study(&cfg, &[20, 40, 80]).unwrap();
        let order = report.finest_order_l2().unwrap();
        assert!((order - 2.0).abs() < 0.15, "order {order}");
        // prediction column present and close to the measurement
        let last = report.rows.last().unwrap();
        let (p, e) = (last.predicted.unwrap(), last.eps_star.unwrap());
        assert!(p > 0.0 && e > 0.0);
    }

    #[test]
    fn numeric_matches_prediction_on_one_point() {
        let tab = builtin_tableau("ssprk2_sd").unwrap();
        let numeric = numeric_error_star(&tab, 1, 0.3, 40).unwrap();
        let predicted = predicted_error_star(&tab, 1, 0.3, 40, 1.0).unwrap();
        let rel = (numeric - predicted).abs() / predicted;
        assert!(rel < 0.05, "numeric {numeric:.4e} predicted {predicted:.4e}");
    }

    #[test]
    fn reference_cache_round_trips() {
        let dir = temp_dir("refcache");
        // smooth Burgers dressed up with a reference recipe; the gap to the
        // 4x-fine run must be small and the cache must serve the second call
        let Scenario::OneD(mut s) = scenario("burgers_smooth").unwrap() else { panic!() };
        s.exact = None;
        s.reference =
            Some(crate::problems::ReferenceSpec { scheme: "rkdg2", k: 1, cfl: 0.3, refine: 4 });
        let cfg = RunConfig {
            scenario: "burgers_smooth".into(),
            scheme: "ssprk2_sd".into(),
            cfl: Some(0.3),
            n: Some(40),
            ..RunConfig::default()
        };
        let (_, r) = resolve(&cfg).unwrap();
        let solved = solve_1d(&s, &r).unwrap();
        let g1 = reference_density_gap(&s, &solved, &dir).unwrap();
        let wrote = std::fs::read_dir(&dir).unwrap().count();
        assert_eq!(wrote, 1);
        let g2 = reference_density_gap(&s, &solved, &dir).unwrap();
        assert_eq!(g1, g2);
        assert!(g1 < 1e-3, "gap {g1}");
        std::fs::remove_dir_all(dir).ok();
    }

    #[test]
    fn listings_cover_everything() {
        assert_eq!(list_scenarios().len(), 10);
        assert!(list_schemes().contains(&"generic3"));
    }
}
