use serde::{Deserialize, Serialize};

use crate::spectral::SpectralGrid;
use crate::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let (x, w): (&[f64], &[f64]) = match order {
        1 => (&[0.0], &[2.0]),
        2 => (&[-0.577_350_269_189_625_8, 0.577_350_269_189_625_8], &[1.0, 1.0]),
        3 => (
            &[-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4],
            &[0.555_555_555_555_555_6, 0.888_888_888_888_889, 0.555_555_555_555_555_6],
        ),
        4 => (
            &[-0.861_136_311_594_052_6, -0.339_981_043_584_856_3, 0.339_981_043_584_856_3, 0.861_136_311_594_052_6],
            &[0.347_854_845_137_453_9, 0.652_145_154_862_546_1, 0.652_145_154_862_546_1, 0.347_854_845_137_453_9],
        ),
        5 => (
            &[-0.906_179_845_938_664, -0.538_469_310_105_683_1, 0.0, 0.538_469_310_105_683_1, 0.906_179_845_938_664],
            &[
                0.236_926_885_056_189_1,
                0.478_628_670_499_366_5,
                0.568_888_888_888_888_9,
                0.478_628_670_499_366_5,
                0.236_926_885_056_189_1,
            ],
        ),
        _ => return Err(Error::Constraint(format!("quadrature order must be in 1..=5, got {order}"))),
    };
    Ok((x.to_vec(), w.to_vec()))
}

/// A quadrature point of the vertical mesh with the two local hat functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadPoint {
    pub elem: usize,
    pub z: f64,
    pub weight: f64,
    /// Values of the hats of nodes `elem` and `elem + 1`.
    pub psi: [f64; 2],
    pub dpsi: [f64; 2],
}

/// Spectral grid in `x′` times linear elements in `x3` on `[z0, h]`.
///
/// Node 0 is the flattened surface and carries the Dirichlet condition, so
/// the unknowns are nodes `1..=nz` for every mode and component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripMesh {
    grid: SpectralGrid,
    nodes: Vec<f64>,
    quad_order: usize,
}

impl StripMesh {
    pub fn new(grid: SpectralGrid, nodes: Vec<f64>, quad_order: usize) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::Constraint("mesh needs at least one element".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Constraint("mesh nodes must be strictly increasing".into()));
        }
        gauss_legendre(quad_order)?;
        Ok(Self { grid, nodes, quad_order })
    }

    pub fn uniform(grid: SpectralGrid, z0: f64, h: f64, nz: usize, quad_order: usize) -> Result<Self> {
        if nz == 0 || !(h > z0) {
            return Err(Error::Constraint(format!("need nz > 0 and h > z0 (nz = {nz}, z0 = {z0}, h = {h})")));
        }
        let dz = (h - z0) / nz as f64;
        let mut nodes: Vec<f64> = (0..=nz).map(|k| z0 + k as f64 * dz).collect();
        nodes[nz] = h;
        Self::new(grid, nodes, quad_order)
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn nz(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn z0(&self) -> f64 {
        self.nodes[0]
    }

    pub fn top(&self) -> f64 {
        self.nodes[self.nz()]
    }

    pub fn quad_order(&self) -> usize {
        self.quad_order
    }

    pub fn n_modes(&self) -> usize {
        self.grid.n_modes()
    }

    /// Unknowns per mode.
    pub fn block_size(&self) -> usize {
        3 * self.nz()
    }

    pub fn n_unknowns(&self) -> usize {
        self.n_modes() * self.block_size()
    }

    /// Unknown index of component `c` at node `k ≥ 1` of mode `m`.
    pub fn index(&self, m: usize, k: usize, c: usize) -> usize {
        debug_assert!(k >= 1 && k <= self.nz() && c < 3);
        (m * self.nz() + (k - 1)) * 3 + c
    }

    pub fn quad_points(&self) -> Vec<QuadPoint> {
        let (gx, gw) = gauss_legendre(self.quad_order).expect("order validated at construction");
        let mut out = Vec::with_capacity(self.nz() * gx.len());
        for e in 0..self.nz() {
            let (a, b) = (self.nodes[e], self.nodes[e + 1]);
            let len = b - a;
            for (x, w) in gx.iter().zip(&gw) {
                let s = 0.5 * (x + 1.0);
                out.push(QuadPoint {
                    elem: e,
                    z: a + s * len,
                    weight: 0.5 * w * len,
                    psi: [1.0 - s, s],
                    dpsi: [-1.0 / len, 1.0 / len],
                });
            }
        }
        out
    }

    /// Element containing `z` (clamped to the mesh).
    pub fn locate(&self, z: f64) -> usize {
        match self.nodes.binary_search_by(|p| p.partial_cmp(&z).expect("finite node")) {
            Ok(k) => k.min(self.nz() - 1),
            Err(k) => k.saturating_sub(1).min(self.nz() - 1),
        }
    }

    /// A copy with a different horizontal grid.
    pub fn with_grid(&self, grid: SpectralGrid) -> Self {
        Self { grid, ..self.clone() }
    }
}
