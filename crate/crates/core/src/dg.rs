//! The DG spatial divergence operators at polynomial level k and k-1.
//!
//! The level-(k-1) operator equals the L2 projection of the level-k operator;
//! the assembly below computes each modal coefficient independently, so
//! skipping the top-degree modes yields bitwise the same lower modes as
//! assembling everything and truncating.

use std::sync::Arc;

use crate::basis::{ref_basis, ref_basis_deriv};
use crate::error::{Result, SolverError};
use crate::field::{DGField, ModeLayout};
use crate::flops;
use crate::flux::{numerical_flux, FluxKind};
use crate::mesh::{Mesh1D, Mesh2D};
use crate::quadrature::volume_rule;
use crate::system::{State, System, MAX_COMP};

/// Stage-space selector: the full degree-k space or the reduced degree-(k-1)
/// space of the stage-dependent schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceLevel {
    High,
    Low,
}

impl SpaceLevel {
    pub fn degree(self, k: usize) -> Result<usize> {
        match self {
            SpaceLevel::High => Ok(k),
            SpaceLevel::Low => {
                if k == 0 {
                    Err(SolverError::InvalidArgument(
                        "level k-1 requires k >= 1".into(),
                    ))
                } else {
                    Ok(k - 1)
                }
            }
        }
    }
}

/// Exterior-trace rule at a non-periodic 1D boundary.
#[derive(Clone)]
pub enum EndBc1d {
    Reflective,
    Outflow,
    /// Prescribed state as a function of time.
    Inflow(Arc<dyn Fn(f64) -> State + Send + Sync>),
}

#[derive(Clone)]
pub enum Bc1d {
    Periodic,
    Ends { left: EndBc1d, right: EndBc1d },
}

impl EndBc1d {
    fn ghost(&self, sys: &System, interior: &State, t: f64) -> State {
        match self {
            EndBc1d::Reflective => sys.reflect(interior, 0),
            EndBc1d::Outflow => *interior,
            EndBc1d::Inflow(f) => f(t),
        }
    }
}

/// 1D spatial operator context.
pub struct Dg1d<'a> {
    pub mesh: &'a Mesh1D,
    pub sys: System,
    pub flux: FluxKind,
    pub bc: Bc1d,
    /// Dissipation coefficient for the global Lax-Friedrichs flux, refreshed
    /// once per step from the current cell averages.
    pub global_alpha: f64,
}

impl Dg1d<'_> {
    /// Modal coefficients of the divergence of f(u_h), tested against
    /// polynomials of degree <= level. Top modes above the level are zero.
    pub fn divergence(&self, field: &DGField, level: SpaceLevel, t: f64) -> Result<DGField> {
        let k = field.k();
        let out_degree = level.degree(k)?;
        let n_out = out_degree + 1;
        let n = self.mesh.n_cells();
        let n_comp = field.n_comp;
        let rule = volume_rule(k)?;
        let nq = rule.len();

        // basis tables at volume points and at the endpoints
        let mut b = vec![vec![0.0; nq]; k + 1];
        let mut db = vec![vec![0.0; nq]; k + 1];
        for l in 0..=k {
            for (q, &r) in rule.points.iter().enumerate() {
                b[l][q] = ref_basis(l, r);
                db[l][q] = ref_basis_deriv(l, r);
            }
        }
        let b_right: Vec<f64> = (0..=k).map(|l| ref_basis(l, 1.0)).collect();
        let b_left: Vec<f64> = (0..=k).map(|l| ref_basis(l, -1.0)).collect();

        // interface traces
        let mut trace_l = vec![[0.0; MAX_COMP]; n];
        let mut trace_r = vec![[0.0; MAX_COMP]; n];
        for j in 0..n {
            let inv_sqrt_h = 1.0 / self.mesh.cell_size(j).sqrt();
            for comp in 0..n_comp {
                let mut vl = 0.0;
                let mut vr = 0.0;
                for l in 0..=k {
                    let a = field.get(j, comp, l);
                    vl += a * b_left[l];
                    vr += a * b_right[l];
                }
                trace_l[j][comp] = vl * inv_sqrt_h;
                trace_r[j][comp] = vr * inv_sqrt_h;
            }
        }

        // face fluxes, evaluated once per face; face i sits at node i
        let mut fhat = vec![[0.0; MAX_COMP]; n + 1];
        for i in 1..n {
            fhat[i] = numerical_flux(
                self.flux,
                &self.sys,
                &trace_r[i - 1],
                &trace_l[i],
                0,
                self.global_alpha,
            )
            .map_err(|e| locate(e, &format!("face {i}")))?;
        }
        match &self.bc {
            Bc1d::Periodic => {
                let f = numerical_flux(
                    self.flux,
                    &self.sys,
                    &trace_r[n - 1],
                    &trace_l[0],
                    0,
                    self.global_alpha,
                )
                .map_err(|e| locate(e, "periodic face"))?;
                fhat[0] = f;
                fhat[n] = f;
            }
            Bc1d::Ends { left, right } => {
                let ghost_l = left.ghost(&self.sys, &trace_l[0], t);
                fhat[0] = numerical_flux(
                    self.flux,
                    &self.sys,
                    &ghost_l,
                    &trace_l[0],
                    0,
                    self.global_alpha,
                )
                .map_err(|e| locate(e, "left boundary"))?;
                let ghost_r = right.ghost(&self.sys, &trace_r[n - 1], t);
                fhat[n] = numerical_flux(
                    self.flux,
                    &self.sys,
                    &trace_r[n - 1],
                    &ghost_r,
                    0,
                    self.global_alpha,
                )
                .map_err(|e| locate(e, "right boundary"))?;
            }
        }

        let mut out = DGField::zeros(field.layout.clone(), n_comp, n);
        let mut u_q = [0.0; MAX_COMP];
        for j in 0..n {
            let h = self.mesh.cell_size(j);
            let inv_sqrt_h = 1.0 / h.sqrt();
            // physical flux at the volume quadrature points
            let mut f_q = vec![[0.0; MAX_COMP]; nq];
            for q in 0..nq {
                for comp in 0..n_comp {
                    let mut v = 0.0;
                    for l in 0..=k {
                        v += field.get(j, comp, l) * b[l][q];
                    }
                    u_q[comp] = v * inv_sqrt_h;
                }
                self.sys
                    .check_admissible(&u_q, "volume quadrature")
                    .map_err(|e| locate(e, &format!("cell {j}")))?;
                f_q[q] = self.sys.flux(&u_q, 0);
            }
            for l in 0..n_out {
                for comp in 0..n_comp {
                    let mut acc = 0.0;
                    for q in 0..nq {
                        acc += rule.weights[q] * f_q[q][comp] * db[l][q];
                    }
                    let v = inv_sqrt_h
                        * (-acc + fhat[j + 1][comp] * b_right[l] - fhat[j][comp] * b_left[l]);
                    out.set(j, comp, l, v);
                }
            }
            flops::add((n_out * n_comp * (nq + 2)) as u64);
        }
        Ok(out)
    }
}

/// Exterior-trace rule along one edge of the 2D domain.
#[derive(Clone)]
pub enum EdgeBc2d {
    Reflective,
    Outflow,
    /// Prescribed state as a function of (t, coordinate along the edge).
    Inflow(Arc<dyn Fn(f64, f64) -> State + Send + Sync>),
    /// Fully general ghost rule from (t, coordinate, interior trace); used
    /// for mixed edges such as the double-Mach bottom boundary.
    Custom(Arc<dyn Fn(f64, f64, &State) -> State + Send + Sync>),
}

#[derive(Clone)]
pub enum AxisBc2d {
    Periodic,
    Ends { low: EdgeBc2d, high: EdgeBc2d },
}

#[derive(Clone)]
pub struct Bc2d {
    pub x: AxisBc2d,
    pub y: AxisBc2d,
}

impl EdgeBc2d {
    fn ghost(&self, sys: &System, dir: usize, interior: &State, t: f64, pos: f64) -> State {
        match self {
            EdgeBc2d::Reflective => sys.reflect(interior, dir),
            EdgeBc2d::Outflow => *interior,
            EdgeBc2d::Inflow(f) => f(t, pos),
            EdgeBc2d::Custom(f) => f(t, pos, interior),
        }
    }
}

/// 2D spatial operator context on a rectangular (possibly masked) mesh.
pub struct Dg2d<'a> {
    pub mesh: &'a Mesh2D,
    pub sys: System,
    pub flux: FluxKind,
    pub bc: Bc2d,
    pub global_alpha: f64,
}

struct Traces {
    /// [cell][side][q] with sides 0=x-low, 1=x-high, 2=y-low, 3=y-high
    data: Vec<[Vec<State>; 4]>,
}

impl Dg2d<'_> {
    pub fn divergence(&self, field: &DGField, level: SpaceLevel, t: f64) -> Result<DGField> {
        let k = field.k();
        let out_degree = level.degree(k)?;
        let modes = match &field.layout {
            ModeLayout::TwoD { modes, .. } => modes.clone(),
            _ => return Err(SolverError::InvalidArgument("2D operator on 1D field".into())),
        };
        let n_out = field.layout.n_modes_up_to(out_degree);
        let n_comp = field.n_comp;
        let mesh = self.mesh;
        let (hx, hy) = (mesh.hx(), mesh.hy());
        let s = 1.0 / (hx * hy).sqrt();
        let rule = volume_rule(k)?;
        let nq = rule.len();

        let mut b = vec![vec![0.0; nq]; k + 1];
        let mut db = vec![vec![0.0; nq]; k + 1];
        for l in 0..=k {
            for (q, &r) in rule.points.iter().enumerate() {
                b[l][q] = ref_basis(l, r);
                db[l][q] = ref_basis_deriv(l, r);
            }
        }
        let b_hi: Vec<f64> = (0..=k).map(|l| ref_basis(l, 1.0)).collect();
        let b_lo: Vec<f64> = (0..=k).map(|l| ref_basis(l, -1.0)).collect();

        let traces = self.compute_traces(field, &modes, &b, &b_lo, &b_hi, nq, s)?;
        let mut out = DGField::zeros(field.layout.clone(), n_comp, field.n_cells);

        self.assemble_faces(
            field, &modes, &traces, &mut out, 0, &rule, &b, &b_lo, &b_hi, t, n_out, n_comp, s,
        )?;
        self.assemble_faces(
            field, &modes, &traces, &mut out, 1, &rule, &b, &b_lo, &b_hi, t, n_out, n_comp, s,
        )?;
        self.assemble_volume(field, &modes, &mut out, &rule.weights, &b, &db, n_out, n_comp, s)?;
        Ok(out)
    }

    fn compute_traces(
        &self,
        field: &DGField,
        modes: &[(usize, usize)],
        b: &[Vec<f64>],
        b_lo: &[f64],
        b_hi: &[f64],
        nq: usize,
        s: f64,
    ) -> Result<Traces> {
        let mut data = Vec::with_capacity(field.n_cells);
        for c in 0..field.n_cells {
            let mut sides: [Vec<State>; 4] = [
                vec![[0.0; MAX_COMP]; nq],
                vec![[0.0; MAX_COMP]; nq],
                vec![[0.0; MAX_COMP]; nq],
                vec![[0.0; MAX_COMP]; nq],
            ];
            for q in 0..nq {
                for comp in 0..field.n_comp {
                    let mut xl = 0.0;
                    let mut xh = 0.0;
                    let mut yl = 0.0;
                    let mut yh = 0.0;
                    for (m, &(a, bb)) in modes.iter().enumerate() {
                        let coeff = field.get(c, comp, m);
                        xl += coeff * b_lo[a] * b[bb][q];
                        xh += coeff * b_hi[a] * b[bb][q];
                        yl += coeff * b[a][q] * b_lo[bb];
                        yh += coeff * b[a][q] * b_hi[bb];
                    }
                    sides[0][q][comp] = xl * s;
                    sides[1][q][comp] = xh * s;
                    sides[2][q][comp] = yl * s;
                    sides[3][q][comp] = yh * s;
                }
            }
            data.push(sides);
        }
        Ok(Traces { data })
    }

    /// Faces orthogonal to axis `dir`. Each face flux is evaluated once and
    /// scattered to both neighbors.
    #[allow(clippy::too_many_arguments)]
    fn assemble_faces(
        &self,
        field: &DGField,
        modes: &[(usize, usize)],
        traces: &Traces,
        out: &mut DGField,
        dir: usize,
        rule: &crate::quadrature::QuadratureRule,
        b: &[Vec<f64>],
        b_lo: &[f64],
        b_hi: &[f64],
        t: f64,
        n_out: usize,
        n_comp: usize,
        s: f64,
    ) -> Result<()> {
        let mesh = self.mesh;
        let (hx, hy) = (mesh.hx(), mesh.hy());
        let weights = &rule.weights;
        let nq = weights.len();
        let k = field.k();
        let (n_along, n_across) = if dir == 0 { (mesh.ny, mesh.nx) } else { (mesh.nx, mesh.ny) };
        let face_len = if dir == 0 { hy } else { hx };
        let (axis_bc, axis_periodic) = match if dir == 0 { &self.bc.x } else { &self.bc.y } {
            AxisBc2d::Periodic => (None, true),
            AxisBc2d::Ends { low, high } => (Some((low.clone(), high.clone())), false),
        };
        // trace side indices on each side of a face orthogonal to `dir`
        let (side_neg, side_pos) = if dir == 0 { (1usize, 0usize) } else { (3usize, 2usize) };

        let mut fhat = vec![[0.0; MAX_COMP]; nq];
        for j in 0..n_along {
            for i in 0..=n_across {
                // cells on the negative/positive side of face i
                let neg = if i > 0 {
                    self.cell_at(dir, i - 1, j)
                } else if axis_periodic {
                    self.cell_at(dir, n_across - 1, j)
                } else {
                    None
                };
                let pos = if i < n_across {
                    self.cell_at(dir, i, j)
                } else if axis_periodic {
                    self.cell_at(dir, 0, j)
                } else {
                    None
                };
                if axis_periodic && i == n_across {
                    continue; // wrapped face already handled at i == 0
                }
                if neg.is_none() && pos.is_none() {
                    continue;
                }

                // positions of the face quadrature points along the face
                let pos_of = |q: usize| -> f64 {
                    let r = rule.points[q];
                    if dir == 0 {
                        mesh.domain.2 + (j as f64 + 0.5 * (1.0 + r)) * hy
                    } else {
                        mesh.domain.0 + (j as f64 + 0.5 * (1.0 + r)) * hx
                    }
                };

                for q in 0..nq {
                    let u_neg: State;
                    let u_pos: State;
                    match (neg, pos) {
                        (Some(cn), Some(cp)) => {
                            u_neg = traces.data[cn][side_neg][q];
                            u_pos = traces.data[cp][side_pos][q];
                        }
                        (Some(cn), None) => {
                            u_neg = traces.data[cn][side_neg][q];
                            u_pos = if i == n_across {
                                match &axis_bc {
                                    Some((_, high)) => {
                                        high.ghost(&self.sys, dir, &u_neg, t, pos_of(q))
                                    }
                                    None => {
                                        return Err(SolverError::Config(
                                            "missing boundary condition on high edge".into(),
                                        ))
                                    }
                                }
                            } else {
                                // masked neighbor: solid wall
                                self.sys.reflect(&u_neg, dir)
                            };
                        }
                        (None, Some(cp)) => {
                            u_pos = traces.data[cp][side_pos][q];
                            u_neg = if i == 0 {
                                match &axis_bc {
                                    Some((low, _)) => {
                                        low.ghost(&self.sys, dir, &u_pos, t, pos_of(q))
                                    }
                                    None => {
                                        return Err(SolverError::Config(
                                            "missing boundary condition on low edge".into(),
                                        ))
                                    }
                                }
                            } else {
                                self.sys.reflect(&u_pos, dir)
                            };
                        }
                        (None, None) => unreachable!(),
                    }
                    fhat[q] = numerical_flux(
                        self.flux,
                        &self.sys,
                        &u_neg,
                        &u_pos,
                        dir,
                        self.global_alpha,
                    )
                    .map_err(|e| locate(e, &format!("face dir={dir} i={i} j={j}")))?;
                }

                // moments of the face flux against the along-face basis
                let mut moment = vec![[0.0; MAX_COMP]; k + 1];
                for (l, m) in moment.iter_mut().enumerate() {
                    for comp in 0..n_comp {
                        let mut acc = 0.0;
                        for q in 0..nq {
                            acc += weights[q] * fhat[q][comp] * b[l][q];
                        }
                        m[comp] = acc;
                    }
                }
                flops::add(((k + 1) * n_comp * nq) as u64);

                let scale = s * 0.5 * face_len;
                if let Some(cn) = neg {
                    for (m, &(a, bb)) in modes.iter().enumerate().take(n_out) {
                        let (face_mode, along_mode) = if dir == 0 { (a, bb) } else { (bb, a) };
                        for comp in 0..n_comp {
                            let i0 = out.idx(cn, comp, m);
                            out.data[i0] += scale * b_hi[face_mode] * moment[along_mode][comp];
                        }
                    }
                    flops::add((n_out * n_comp) as u64);
                }
                if let Some(cp) = pos {
                    for (m, &(a, bb)) in modes.iter().enumerate().take(n_out) {
                        let (face_mode, along_mode) = if dir == 0 { (a, bb) } else { (bb, a) };
                        for comp in 0..n_comp {
                            let i0 = out.idx(cp, comp, m);
                            out.data[i0] -= scale * b_lo[face_mode] * moment[along_mode][comp];
                        }
                    }
                    flops::add((n_out * n_comp) as u64);
                }
            }
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble_volume(
        &self,
        field: &DGField,
        modes: &[(usize, usize)],
        out: &mut DGField,
        weights: &[f64],
        b: &[Vec<f64>],
        db: &[Vec<f64>],
        n_out: usize,
        n_comp: usize,
        s: f64,
    ) -> Result<()> {
        let mesh = self.mesh;
        let (hx, hy) = (mesh.hx(), mesh.hy());
        let nq = weights.len();
        let mut u_q = [0.0; MAX_COMP];
        let mut f_q = vec![[0.0; MAX_COMP]; nq * nq];
        let mut g_q = vec![[0.0; MAX_COMP]; nq * nq];
        for c in 0..field.n_cells {
            for qy in 0..nq {
                for qx in 0..nq {
                    for comp in 0..n_comp {
                        let mut v = 0.0;
                        for (m, &(a, bb)) in modes.iter().enumerate() {
                            v += field.get(c, comp, m) * b[a][qx] * b[bb][qy];
                        }
                        u_q[comp] = v * s;
                    }
                    self.sys
                        .check_admissible(&u_q, "volume quadrature")
                        .map_err(|e| locate(e, &format!("active cell {c}")))?;
                    f_q[qy * nq + qx] = self.sys.flux(&u_q, 0);
                    g_q[qy * nq + qx] = self.sys.flux(&u_q, 1);
                }
            }
            for (m, &(a, bb)) in modes.iter().enumerate().take(n_out) {
                for comp in 0..n_comp {
                    let mut acc_f = 0.0;
                    let mut acc_g = 0.0;
                    for qy in 0..nq {
                        for qx in 0..nq {
                            let w = weights[qx] * weights[qy];
                            acc_f += w * f_q[qy * nq + qx][comp] * db[a][qx] * b[bb][qy];
                            acc_g += w * g_q[qy * nq + qx][comp] * b[a][qx] * db[bb][qy];
                        }
                    }
                    let i0 = out.idx(c, comp, m);
                    out.data[i0] -= s * (0.5 * hy * acc_f + 0.5 * hx * acc_g);
                }
            }
            flops::add((n_out * n_comp * nq * nq * 2) as u64);
        }
        Ok(())
    }

    /// Active-cell index, with (across, along) coordinates relative to `dir`.
    fn cell_at(&self, dir: usize, across: usize, along: usize) -> Option<usize> {
        let (ix, iy) = if dir == 0 { (across, along) } else { (along, across) };
        self.mesh.active_index(ix, iy)
    }
}

fn locate(e: SolverError, loc: &str) -> SolverError {
    match e {
        SolverError::State { context, rho, p } => SolverError::State {
            context: format!("{context} at {loc}"),
            rho,
            p,
        },
        other => other,
    }
}
