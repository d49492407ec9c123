//! Modal coefficient storage for DG solutions in one and two dimensions.

use crate::basis::{modes_2d, ref_basis, MAX_DEGREE};
use crate::error::{Result, SolverError};
use crate::mesh::{Mesh1D, Mesh2D};
use crate::quadrature::QuadratureRule;
use crate::system::{State, MAX_COMP};

/// Mode bookkeeping shared by 1D and 2D fields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModeLayout {
    OneD { k: usize },
    TwoD { k: usize, modes: Vec<(usize, usize)> },
}

impl ModeLayout {
    pub fn one_d(k: usize) -> Result<Self> {
        if k > MAX_DEGREE {
            return Err(SolverError::UnsupportedDegree(k));
        }
        Ok(ModeLayout::OneD { k })
    }

    pub fn two_d(k: usize) -> Result<Self> {
        if k > MAX_DEGREE {
            return Err(SolverError::UnsupportedDegree(k));
        }
        Ok(ModeLayout::TwoD { k, modes: modes_2d(k) })
    }

    pub fn k(&self) -> usize {
        match self {
            ModeLayout::OneD { k } | ModeLayout::TwoD { k, .. } => *k,
        }
    }

    pub fn n_modes(&self) -> usize {
        match self {
            ModeLayout::OneD { k } => k + 1,
            ModeLayout::TwoD { modes, .. } => modes.len(),
        }
    }

    /// Polynomial degree of mode m.
    pub fn mode_degree(&self, m: usize) -> usize {
        match self {
            ModeLayout::OneD { .. } => m,
            ModeLayout::TwoD { modes, .. } => modes[m].0 + modes[m].1,
        }
    }

    /// Number of leading modes with degree <= deg.
    pub fn n_modes_up_to(&self, deg: usize) -> usize {
        (0..self.n_modes()).filter(|&m| self.mode_degree(m) <= deg).count()
    }
}

/// The discrete solution u_h: per active cell, per component, per basis mode.
#[derive(Debug, Clone, PartialEq)]
pub struct DGField {
    pub layout: ModeLayout,
    pub n_comp: usize,
    pub n_cells: usize,
    pub data: Vec<f64>,
}

impl DGField {
    pub fn zeros(layout: ModeLayout, n_comp: usize, n_cells: usize) -> Self {
        let len = n_cells * n_comp * layout.n_modes();
        Self { layout, n_comp, n_cells, data: vec![0.0; len] }
    }

    #[inline]
    pub fn idx(&self, cell: usize, comp: usize, mode: usize) -> usize {
        (cell * self.n_comp + comp) * self.layout.n_modes() + mode
    }

    #[inline]
    pub fn get(&self, cell: usize, comp: usize, mode: usize) -> f64 {
        self.data[self.idx(cell, comp, mode)]
    }

    #[inline]
    pub fn set(&mut self, cell: usize, comp: usize, mode: usize, v: f64) {
        let i = self.idx(cell, comp, mode);
        self.data[i] = v;
    }

    pub fn k(&self) -> usize {
        self.layout.k()
    }

    pub fn n_modes(&self) -> usize {
        self.layout.n_modes()
    }

    /// self += scale * other
    pub fn axpy(&mut self, scale: f64, other: &DGField) {
        debug_assert_eq!(self.data.len(), other.data.len());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += scale * b;
        }
    }

    pub fn scale(&mut self, s: f64) {
        for a in &mut self.data {
            *a *= s;
        }
    }

    /// L2 projection to degree k-1: zero every top-degree mode.
    pub fn project_down(&self) -> Result<DGField> {
        let k = self.k();
        if k == 0 {
            return Err(SolverError::InvalidArgument(
                "cannot project a degree-0 field down".into(),
            ));
        }
        let mut out = self.clone();
        let n_modes = self.n_modes();
        for cell in 0..self.n_cells {
            for comp in 0..self.n_comp {
                for m in 0..n_modes {
                    if self.layout.mode_degree(m) == k {
                        out.set(cell, comp, m, 0.0);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn has_nan(&self) -> bool {
        self.data.iter().any(|v| !v.is_finite())
    }
}

/// Evaluate a 1D field at reference coordinate r of a cell.
pub fn evaluate_1d(field: &DGField, mesh: &Mesh1D, cell: usize, r: f64, out: &mut State) -> Result<()> {
    if cell >= field.n_cells {
        return Err(SolverError::InvalidArgument(format!(
            "cell index {cell} out of range (n_cells={})",
            field.n_cells
        )));
    }
    let h = mesh.cell_size(cell);
    let inv_sqrt_h = 1.0 / h.sqrt();
    let n_modes = field.n_modes();
    for comp in 0..field.n_comp {
        let mut v = 0.0;
        for l in 0..n_modes {
            v += field.get(cell, comp, l) * ref_basis(l, r);
        }
        out[comp] = v * inv_sqrt_h;
    }
    Ok(())
}

/// Evaluate a 2D field at reference coordinates (rx, ry) of an active cell.
pub fn evaluate_2d(
    field: &DGField,
    mesh: &Mesh2D,
    active_cell: usize,
    rx: f64,
    ry: f64,
    out: &mut State,
) -> Result<()> {
    if active_cell >= field.n_cells {
        return Err(SolverError::InvalidArgument("active cell out of range".into()));
    }
    let modes = match &field.layout {
        ModeLayout::TwoD { modes, .. } => modes,
        _ => return Err(SolverError::InvalidArgument("2D evaluation on 1D field".into())),
    };
    let s = 1.0 / (mesh.hx() * mesh.hy()).sqrt();
    for comp in 0..field.n_comp {
        let mut v = 0.0;
        for (m, &(a, b)) in modes.iter().enumerate() {
            v += field.get(active_cell, comp, m) * ref_basis(a, rx) * ref_basis(b, ry);
        }
        out[comp] = v * s;
    }
    Ok(())
}

/// Cell-by-cell L2 projection of a function onto the 1D modal space.
pub fn project_function_1d<F>(mesh: &Mesh1D, k: usize, n_comp: usize, f: F) -> Result<DGField>
where
    F: Fn(f64) -> State,
{
    let layout = ModeLayout::one_d(k)?;
    let rule = QuadratureRule::gauss_legendre(k + 3)?;
    let mut field = DGField::zeros(layout, n_comp, mesh.n_cells());
    for j in 0..mesh.n_cells() {
        let h = mesh.cell_size(j);
        let sqrt_h = h.sqrt();
        for (&r, &w) in rule.points.iter().zip(&rule.weights) {
            let x = mesh.to_physical(j, r);
            let vals = f(x);
            for l in 0..=k {
                let phi = ref_basis(l, r);
                for comp in 0..n_comp {
                    let i = field.idx(j, comp, l);
                    field.data[i] += 0.5 * sqrt_h * w * vals[comp] * phi;
                }
            }
        }
    }
    Ok(field)
}

/// Cell-by-cell L2 projection onto the 2D P^k space over active cells.
pub fn project_function_2d<F>(mesh: &Mesh2D, k: usize, n_comp: usize, f: F) -> Result<DGField>
where
    F: Fn(f64, f64) -> State,
{
    let layout = ModeLayout::two_d(k)?;
    let modes = modes_2d(k);
    let rule = QuadratureRule::gauss_legendre(k + 3)?;
    let mut field = DGField::zeros(layout, n_comp, mesh.n_active());
    let hx = mesh.hx();
    let hy = mesh.hy();
    let sqrt_area = (hx * hy).sqrt();
    for (c, &(ix, iy)) in mesh.active_cells().iter().enumerate() {
        let (xc, yc) = mesh.cell_center(ix, iy);
        for (&ry, &wy) in rule.points.iter().zip(&rule.weights) {
            let y = yc + 0.5 * ry * hy;
            for (&rx, &wx) in rule.points.iter().zip(&rule.weights) {
                let x = xc + 0.5 * rx * hx;
                let vals = f(x, y);
                for (m, &(a, b)) in modes.iter().enumerate() {
                    let phi = ref_basis(a, rx) * ref_basis(b, ry);
                    for comp in 0..n_comp {
                        let i = field.idx(c, comp, m);
                        field.data[i] += 0.25 * sqrt_area * wx * wy * vals[comp] * phi;
                    }
                }
            }
        }
    }
    Ok(field)
}

/// Per-cell, per-component mean values.
pub fn cell_averages_1d(field: &DGField, mesh: &Mesh1D) -> Vec<[f64; MAX_COMP]> {
    (0..field.n_cells)
        .map(|j| {
            let inv_sqrt_h = 1.0 / mesh.cell_size(j).sqrt();
            let mut avg = [0.0; MAX_COMP];
            for comp in 0..field.n_comp {
                avg[comp] = field.get(j, comp, 0) * inv_sqrt_h;
            }
            avg
        })
        .collect()
}

/// Per-active-cell mean values on a 2D mesh.
pub fn cell_averages_2d(field: &DGField, mesh: &Mesh2D) -> Vec<[f64; MAX_COMP]> {
    let s = 1.0 / (mesh.hx() * mesh.hy()).sqrt();
    (0..field.n_cells)
        .map(|c| {
            let mut avg = [0.0; MAX_COMP];
            for comp in 0..field.n_comp {
                avg[comp] = field.get(c, comp, 0) * s;
            }
            avg
        })
        .collect()
}

/// Total integral of each component (mass), 1D.
pub fn total_mass_1d(field: &DGField, mesh: &Mesh1D) -> [f64; MAX_COMP] {
    let mut mass = [0.0; MAX_COMP];
    for j in 0..field.n_cells {
        let sqrt_h = mesh.cell_size(j).sqrt();
        for comp in 0..field.n_comp {
            mass[comp] += field.get(j, comp, 0) * sqrt_h;
        }
    }
    mass
}

/// Total integral of each component over active cells, 2D.
pub fn total_mass_2d(field: &DGField, mesh: &Mesh2D) -> [f64; MAX_COMP] {
    let sqrt_area = (mesh.hx() * mesh.hy()).sqrt();
    let mut mass = [0.0; MAX_COMP];
    for c in 0..field.n_cells {
        for comp in 0..field.n_comp {
            mass[comp] += field.get(c, comp, 0) * sqrt_area;
        }
    }
    mass
}
