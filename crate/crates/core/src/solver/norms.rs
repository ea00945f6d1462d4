use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::DiscreteField;
use super::mesh::gauss_legendre;
use super::pointwise::{physical_gradient, NF};
use super::strip::MappedStrip;
use crate::geometry::SourceSpec;
use crate::spectral::{point_on, SpectralTransform};
use crate::{Error, Result, C64};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Squared integrals of a field over the reference strip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormParts {
    /// `‖u‖²_{L²}`
    pub l2_sq: f64,
    /// `‖∇u‖²_{L²}`
    pub grad_sq: f64,
    /// `‖∂3 u‖²_{L²}`
    pub dz_sq: f64,
}

impl NormParts {
    pub fn vh(&self) -> f64 {
        (self.l2_sq + self.grad_sq).sqrt()
    }
}

/// Norm pieces in reference coordinates by Parseval over modes; exact for
/// the piecewise-linear field.
pub fn norm_parts(field: &DiscreteField) -> NormParts {
    let mesh = field.mesh();
    let grid = mesh.grid();
    let quad = mesh.quad_points();
    let (mut l2, mut gr, mut dz) = (0.0, 0.0, 0.0);
    for m in 0..grid.n_modes() {
        let xi = grid.xi(m);
        let xi2 = xi[0] * xi[0] + xi[1] * xi[1];
        for q in &quad {
            let (u, du) = field.eval_in(m, q.elem, q.psi, q.dpsi);
            let uu: f64 = u.iter().map(|v| v.norm_sqr()).sum();
            let dd: f64 = du.iter().map(|v| v.norm_sqr()).sum();
            l2 += q.weight * uu;
            gr += q.weight * (xi2 * uu + dd);
            dz += q.weight * dd;
        }
    }
    let a = grid.cell_area();
    NormParts { l2_sq: a * l2, grad_sq: a * gr, dz_sq: a * dz }
}

/// `‖u‖_{V_h} = (‖∇u‖² + ‖u‖²)^{1/2}` on the reference strip.
pub fn vh_norm(field: &DiscreteField) -> f64 {
    norm_parts(field).vh()
}

/// `V_h` norm of `u ∘ H⁻¹` on the physical strip, computed in reference
/// coordinates with the Jacobian of the transform.
pub fn vh_norm_physical(field: &DiscreteField, strip: &MappedStrip) -> Result<f64> {
    if strip.is_uncoupled() && strip.surface().spec().offset == strip.level() {
        return Ok(vh_norm(field));
    }
    let mesh = field.mesh();
    let grid = mesh.grid();
    let nm = grid.n_modes();
    let t = SpectralTransform::new(grid);
    let np = t.padded_len();
    let quad = mesh.quad_points();
    let parts: Vec<f64> = quad
        .par_iter()
        .map(|q| -> Result<f64> {
            let mut feats = vec![vec![ZERO; nm]; NF];
            for m in 0..nm {
                let xi = grid.xi(m);
                let (u, du) = field.eval_in(m, q.elem, q.psi, q.dpsi);
                for c in 0..3 {
                    feats[3 * c][m] = C64::new(0.0, xi[0]) * u[c];
                    feats[3 * c + 1][m] = C64::new(0.0, xi[1]) * u[c];
                    feats[3 * c + 2][m] = du[c];
                    feats[9 + c][m] = u[c];
                }
            }
            let mut vals = vec![vec![ZERO; np]; NF];
            for f in 0..NF {
                t.padded_values_into(&feats[f], &mut vals[f]);
            }
            let mut acc = 0.0;
            for p in 0..np {
                let (row, _) = strip.row_and_height(t.padded_point(p), q.z)?;
                let gy: [C64; 9] = std::array::from_fn(|k| vals[k][p]);
                let gx = physical_gradient(&gy, row);
                let s: f64 =
                    gx.iter().map(|v| v.norm_sqr()).sum::<f64>() + (9..12).map(|k| vals[k][p].norm_sqr()).sum::<f64>();
                acc += s * (1.0 + row[2]);
            }
            Ok(q.weight * acc)
        })
        .collect::<Result<_>>()?;
    Ok((grid.cell_area() / np as f64 * parts.iter().sum::<f64>()).sqrt())
}

/// Both sides of `‖u‖²_{L²} ≤ (h − z0) ‖∂3u‖²_{L²}` for a field with zero
/// bottom trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoincareCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl PoincareCheck {
    pub fn holds(&self, slack: f64) -> bool {
        self.lhs <= self.rhs + slack * self.rhs.max(1.0)
    }
}

pub fn poincare_check(field: &DiscreteField) -> Result<PoincareCheck> {
    if !field.bottom_zero() {
        return Err(Error::Constraint("Poincaré check needs a zero bottom trace".into()));
    }
    let p = norm_parts(field);
    let height = field.mesh().top() - field.mesh().z0();
    Ok(PoincareCheck { lhs: p.l2_sq, rhs: height * p.dz_sq })
}

/// `(‖g‖_{L²}, ‖g‖_{H¹})` of the source on the physical strip. The source is
/// supported strictly above the surface, so the surface does not enter.
pub fn source_norms(g: &SourceSpec, cell: [f64; 2]) -> (f64, f64) {
    if g.is_zero() {
        return (0.0, 0.0);
    }
    let jmax = g.modes.iter().fold([0usize; 2], |acc, m| {
        [acc[0].max(m.j[0].unsigned_abs() as usize), acc[1].max(m.j[1].unsigned_abs() as usize)]
    });
    let dims = [4 * jmax[0] + 3, 4 * jmax[1] + 3];
    let (gx, gw) = gauss_legendre(5).expect("order 5 is tabulated");
    let [lo, hi] = g.support;
    let panels = 64;
    let dz = (hi - lo) / panels as f64;
    let (mut l2, mut h1) = (0.0, 0.0);
    for p in 0..dims[0] * dims[1] {
        let x = point_on(p, dims, cell);
        for k in 0..panels {
            for (s, w) in gx.iter().zip(&gw) {
                let z = lo + (k as f64 + 0.5 * (s + 1.0)) * dz;
                let v = g.value([x[0], x[1], z], cell);
                let d = g.gradient([x[0], x[1], z], cell);
                let vv: f64 = v.iter().map(|c| c.norm_sqr()).sum();
                let dd: f64 = d.iter().flatten().map(|c| c.norm_sqr()).sum();
                l2 += 0.5 * w * dz * vv;
                h1 += 0.5 * w * dz * (vv + dd);
            }
        }
    }
    let scale = cell[0] * cell[1] / (dims[0] * dims[1]) as f64;
    ((l2 * scale).sqrt(), (h1 * scale).sqrt())
}

/// `(‖g̃‖_{L²}, ‖g̃‖_{H¹})` of the pulled-back source `g̃ = g ∘ H` on the
/// reference strip, with `∇_y g̃ = ∇_x g · J`. Integrated on a composite
/// five-point rule over `panels` uniform layers of `[z0, h]`.
pub fn source_norms_reference(
    g: &SourceSpec,
    strip: &MappedStrip,
    z0: f64,
    h: f64,
    dims: [usize; 2],
    panels: usize,
) -> Result<(f64, f64)> {
    if g.is_zero() {
        return Ok((0.0, 0.0));
    }
    let cell = strip.surface().cell();
    let (gx, gw) = gauss_legendre(5)?;
    let dz = (h - z0) / panels as f64;
    let rows: Vec<(f64, f64)> = (0..dims[0] * dims[1])
        .into_par_iter()
        .map(|p| -> Result<(f64, f64)> {
            let x = point_on(p, dims, cell);
            let (mut l2, mut h1) = (0.0, 0.0);
            for k in 0..panels {
                for (s, w) in gx.iter().zip(&gw) {
                    let z = z0 + (k as f64 + 0.5 * (s + 1.0)) * dz;
                    let (row, x3) = strip.row_and_height(x, z)?;
                    let v = g.value([x[0], x[1], x3], cell);
                    let d = g.gradient([x[0], x[1], x3], cell);
                    let vv: f64 = v.iter().map(|c| c.norm_sqr()).sum();
                    // (∇g J)[i][k] = ∂_k g_i + ∂_3 g_i row[k]
                    let mut dd = 0.0;
                    for i in 0..3 {
                        for kk in 0..3 {
                            dd += (d[i][kk] + d[i][2] * row[kk]).norm_sqr();
                        }
                    }
                    l2 += 0.5 * w * dz * vv;
                    h1 += 0.5 * w * dz * (vv + dd);
                }
            }
            Ok((l2, h1))
        })
        .collect::<Result<_>>()?;
    let scale = cell[0] * cell[1] / (dims[0] * dims[1]) as f64;
    let l2: f64 = rows.iter().map(|r| r.0).sum();
    let h1: f64 = rows.iter().map(|r| r.1).sum();
    Ok(((l2 * scale).sqrt(), (h1 * scale).sqrt()))
}
