use serde::{Deserialize, Serialize};

use super::mesh::StripMesh;
use crate::spectral::BoundaryTrace;
use crate::{Error, Result, C64};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Fourier coefficients of a displacement field at every vertical node.
///
/// `u(x′, z) = Σ_m c_m(z) e^{iξ_m·x′}` with `c_m` piecewise linear in `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteField {
    mesh: StripMesh,
    values: Vec<[C64; 3]>,
    bottom_zero: bool,
}

impl DiscreteField {
    pub fn zeros(mesh: &StripMesh) -> Self {
        let n = mesh.n_modes() * (mesh.nz() + 1);
        Self { mesh: mesh.clone(), values: vec![[ZERO; 3]; n], bottom_zero: true }
    }

    /// Field with zero bottom trace from a vector of unknowns.
    pub fn from_unknowns(mesh: &StripMesh, x: &[C64]) -> Result<Self> {
        if x.len() != mesh.n_unknowns() {
            return Err(Error::Constraint(format!(
                "unknown vector has length {}, mesh needs {}",
                x.len(),
                mesh.n_unknowns()
            )));
        }
        let mut f = Self::zeros(mesh);
        for m in 0..mesh.n_modes() {
            for k in 1..=mesh.nz() {
                for c in 0..3 {
                    f.values[m * (mesh.nz() + 1) + k][c] = x[mesh.index(m, k, c)];
                }
            }
        }
        Ok(f)
    }

    /// Field from nodal coefficients `values[m][k]`, bottom included.
    pub fn from_nodal(mesh: &StripMesh, values: Vec<[C64; 3]>) -> Result<Self> {
        if values.len() != mesh.n_modes() * (mesh.nz() + 1) {
            return Err(Error::Constraint("nodal array does not match the mesh".into()));
        }
        let stride = mesh.nz() + 1;
        let bottom_zero = (0..mesh.n_modes()).all(|m| values[m * stride] == [ZERO; 3]);
        Ok(Self { mesh: mesh.clone(), values, bottom_zero })
    }

    pub fn mesh(&self) -> &StripMesh {
        &self.mesh
    }

    pub fn bottom_zero(&self) -> bool {
        self.bottom_zero
    }

    pub fn unknowns(&self) -> Vec<C64> {
        let mut x = vec![ZERO; self.mesh.n_unknowns()];
        for m in 0..self.mesh.n_modes() {
            for k in 1..=self.mesh.nz() {
                for c in 0..3 {
                    x[self.mesh.index(m, k, c)] = self.node(m, k)[c];
                }
            }
        }
        x
    }

    pub fn nodal(&self) -> &[[C64; 3]] {
        &self.values
    }

    /// Coefficient of mode `m` at node `k`.
    pub fn node(&self, m: usize, k: usize) -> [C64; 3] {
        self.values[m * (self.mesh.nz() + 1) + k]
    }

    /// Coefficient of mode `m` and its `z` derivative inside element `e`.
    pub fn eval_in(&self, m: usize, e: usize, psi: [f64; 2], dpsi: [f64; 2]) -> ([C64; 3], [C64; 3]) {
        let (a, b) = (self.node(m, e), self.node(m, e + 1));
        (
            std::array::from_fn(|c| a[c] * psi[0] + b[c] * psi[1]),
            std::array::from_fn(|c| a[c] * dpsi[0] + b[c] * dpsi[1]),
        )
    }

    /// Coefficient of mode `m` at height `z` by linear interpolation.
    pub fn at(&self, m: usize, z: f64) -> [C64; 3] {
        let e = self.mesh.locate(z);
        let nodes = self.mesh.nodes();
        let s = (z - nodes[e]) / (nodes[e + 1] - nodes[e]);
        self.eval_in(m, e, [1.0 - s, s], [0.0, 0.0]).0
    }

    /// Mode coefficients on the top plane.
    pub fn top_coeffs(&self) -> Vec<[C64; 3]> {
        (0..self.mesh.n_modes()).map(|m| self.node(m, self.mesh.nz())).collect()
    }

    pub fn top_trace(&self) -> BoundaryTrace {
        BoundaryTrace::from_fourier(self.mesh.grid().clone(), self.mesh.top(), &self.top_coeffs())
    }

    pub fn scaled(&self, s: f64) -> Self {
        let values = self.values.iter().map(|v| v.map(|c| c * s)).collect();
        Self { values, ..self.clone() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.mesh != other.mesh {
            return Err(Error::Constraint("fields live on different meshes".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| std::array::from_fn(|c| a[c] - b[c])).collect();
        Ok(Self { mesh: self.mesh.clone(), values, bottom_zero: self.bottom_zero && other.bottom_zero })
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().flat_map(|v| v.iter().map(|c| c.norm())).fold(0.0, f64::max)
    }
}
