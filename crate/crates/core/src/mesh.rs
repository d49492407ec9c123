//! 1D meshes (uniform or node-perturbed) and 2D rectangular meshes with
//! optional masked cells for the forward-step geometry.

use crate::error::{Result, SolverError};

/// Splitmix64 generator. Deliberately spelled out here so perturbed meshes are
/// reproducible bit-for-bit from the seed across language ports.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// 1D mesh as an increasing node list tiling [x_left, x_right].
#[derive(Debug, Clone)]
pub struct Mesh1D {
    pub nodes: Vec<f64>,
}

impl Mesh1D {
    pub fn uniform(domain: (f64, f64), n: usize) -> Result<Self> {
        let (a, b) = domain;
        if n == 0 {
            return Err(SolverError::InvalidArgument("mesh needs at least one cell".into()));
        }
        if !(b > a) {
            return Err(SolverError::InvalidArgument(format!(
                "degenerate domain [{a}, {b}]"
            )));
        }
        let h = (b - a) / n as f64;
        let mut nodes: Vec<f64> = (0..=n).map(|j| a + j as f64 * h).collect();
        // pin the right endpoint exactly
        nodes[n] = b;
        Ok(Self { nodes })
    }

    /// Displace interior nodes by a seeded-uniform amount in
    /// [-max_fraction*h, +max_fraction*h]; endpoints stay fixed.
    pub fn perturbed(&self, max_fraction: f64, seed: u64) -> Result<Self> {
        if !(0.0..0.5).contains(&max_fraction) {
            return Err(SolverError::InvalidArgument(format!(
                "perturbation fraction {max_fraction} must be in [0, 0.5)"
            )));
        }
        let n = self.n_cells();
        let h = (self.nodes[n] - self.nodes[0]) / n as f64;
        let mut rng = SplitMix64::new(seed);
        let mut nodes = self.nodes.clone();
        for node in nodes.iter_mut().take(n).skip(1) {
            let u = rng.next_f64();
            *node += (2.0 * u - 1.0) * max_fraction * h;
        }
        for j in 0..n {
            debug_assert!(nodes[j + 1] > nodes[j]);
        }
        Ok(Self { nodes })
    }

    pub fn n_cells(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn cell_size(&self, j: usize) -> f64 {
        self.nodes[j + 1] - self.nodes[j]
    }

    pub fn cell_center(&self, j: usize) -> f64 {
        0.5 * (self.nodes[j] + self.nodes[j + 1])
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.nodes[0], *self.nodes.last().unwrap())
    }

    pub fn min_cell_size(&self) -> f64 {
        (0..self.n_cells())
            .map(|j| self.cell_size(j))
            .fold(f64::INFINITY, f64::min)
    }

    /// Physical coordinate of reference coordinate r in cell j.
    pub fn to_physical(&self, j: usize, r: f64) -> f64 {
        self.cell_center(j) + 0.5 * r * self.cell_size(j)
    }
}

/// Cell-mask specification for 2D meshes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskSpec {
    None,
    /// Wind-tunnel step: cells inside [0.6, 3] x [0, 0.2] are inactive.
    ForwardStep,
}

/// Tensor-product rectangular mesh. `active` maps raw cell index (iy*nx + ix)
/// to a compact active-cell index; masked cells carry no degrees of freedom.
#[derive(Debug, Clone)]
pub struct Mesh2D {
    pub nx: usize,
    pub ny: usize,
    pub domain: (f64, f64, f64, f64),
    active: Vec<Option<usize>>,
    active_cells: Vec<(usize, usize)>,
}

impl Mesh2D {
    pub fn new(domain: (f64, f64, f64, f64), nx: usize, ny: usize, mask: MaskSpec) -> Result<Self> {
        let (x0, x1, y0, y1) = domain;
        if nx == 0 || ny == 0 {
            return Err(SolverError::InvalidArgument("mesh needs at least one cell".into()));
        }
        if !(x1 > x0 && y1 > y0) {
            return Err(SolverError::InvalidArgument("degenerate 2D domain".into()));
        }
        let hx = (x1 - x0) / nx as f64;
        let hy = (y1 - y0) / ny as f64;
        let mut active = vec![None; nx * ny];
        let mut active_cells = Vec::new();
        for iy in 0..ny {
            for ix in 0..nx {
                let xc = x0 + (ix as f64 + 0.5) * hx;
                let yc = y0 + (iy as f64 + 0.5) * hy;
                let masked = match mask {
                    MaskSpec::None => false,
                    MaskSpec::ForwardStep => {
                        xc > 0.6 && xc < 3.0 && yc > 0.0 && yc < 0.2
                    }
                };
                if !masked {
                    active[iy * nx + ix] = Some(active_cells.len());
                    active_cells.push((ix, iy));
                }
            }
        }
        Ok(Self { nx, ny, domain, active, active_cells })
    }

    pub fn hx(&self) -> f64 {
        (self.domain.1 - self.domain.0) / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        (self.domain.3 - self.domain.2) / self.ny as f64
    }

    pub fn n_active(&self) -> usize {
        self.active_cells.len()
    }

    /// Compact index of cell (ix, iy) or None if masked.
    pub fn active_index(&self, ix: usize, iy: usize) -> Option<usize> {
        self.active[iy * self.nx + ix]
    }

    pub fn active_cells(&self) -> &[(usize, usize)] {
        &self.active_cells
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> (f64, f64) {
        (
            self.domain.0 + (ix as f64 + 0.5) * self.hx(),
            self.domain.2 + (iy as f64 + 0.5) * self.hy(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_cells_are_equal() {
        let mesh = Mesh1D::uniform((0.0, 2.0 * std::f64::consts::PI), 4).unwrap();
        for j in 0..4 {
            let rel = (mesh.cell_size(j) - std::f64::consts::PI / 2.0).abs()
                / (std::f64::consts::PI / 2.0);
            assert!(rel < 1e-14);
        }
        let single = Mesh1D::uniform((0.0, 1.0), 1).unwrap();
        assert_eq!(single.nodes, vec![0.0, 1.0]);
    }

    #[test]
    fn table_one_mesh_layout() {
        let mesh = Mesh1D::uniform((-std::f64::consts::PI, std::f64::consts::PI), 40).unwrap();
        let h = 2.0 * std::f64::consts::PI / 40.0;
        for (j, node) in mesh.nodes.iter().enumerate() {
            assert!((node - (-std::f64::consts::PI + j as f64 * h)).abs() < 1e-13);
        }
    }

    #[test]
    fn degenerate_inputs_rejected() {
        assert!(Mesh1D::uniform((0.0, 1.0), 0).is_err());
        assert!(Mesh1D::uniform((1.0, 1.0), 4).is_err());
        let mesh = Mesh1D::uniform((0.0, 1.0), 8).unwrap();
        assert!(mesh.perturbed(0.5, 1).is_err());
    }

    #[test]
    fn perturbation_is_deterministic_and_bounded() {
        let mesh = Mesh1D::uniform((0.0, 1.0), 40).unwrap();
        let a = mesh.perturbed(0.15, 7).unwrap();
        let b = mesh.perturbed(0.15, 7).unwrap();
        assert_eq!(a.nodes, b.nodes); // bitwise
        let zero = mesh.perturbed(0.0, 99).unwrap();
        assert_eq!(zero.nodes, mesh.nodes);
        let h = 1.0 / 40.0;
        assert!(a.min_cell_size() >= 0.7 * h - 1e-15);
        assert_eq!(a.nodes[0], 0.0);
        assert_eq!(*a.nodes.last().unwrap(), 1.0);
        assert_ne!(a.nodes[1], mesh.nodes[1]);
    }

    #[test]
    fn mesh2d_active_counts() {
        let m = Mesh2D::new((0.0, 1.0, 0.0, 1.0), 2, 2, MaskSpec::None).unwrap();
        assert_eq!(m.n_active(), 4);
        assert!((m.hx() * m.hy() - 0.25).abs() < 1e-15);

        let step = Mesh2D::new((0.0, 3.0, 0.0, 1.0), 240, 80, MaskSpec::ForwardStep).unwrap();
        assert_eq!(step.n_active(), 240 * 80 - 192 * 16);

        let big = Mesh2D::new((0.0, 4.0, 0.0, 1.0), 1920, 480, MaskSpec::None).unwrap();
        assert_eq!(big.n_active(), 921_600);
    }
}
