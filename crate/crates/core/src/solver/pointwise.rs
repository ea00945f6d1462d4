//! The pointwise elastic flux in reference coordinates.
//!
//! Features at a point are the reference gradient `G_y[i][j] = ∂_{y_j} u_i`
//! (flattened as `3i + j`) followed by `u`. The flux pairs with the
//! conjugated test features to give the integrand of the energy form plus
//! the mass term.

use std::ops::{Add, Mul, Neg, Sub};

use crate::C64;

pub(crate) const NF: usize = 12;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Material {
    pub lambda: f64,
    pub mu: f64,
    pub w2: f64,
}

pub(crate) trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
}

impl Scalar for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
}

/// Physical gradient `G_x = G_y J⁻¹` for `J = I + e3 ⊗ row`.
#[inline]
pub(crate) fn physical_gradient<T: Scalar>(gy: &[T; 9], row: [f64; 3]) -> [T; 9] {
    let det = 1.0 + row[2];
    let mut gx = *gy;
    for i in 0..3 {
        let d = gy[3 * i + 2];
        gx[3 * i] = gy[3 * i] - d * (row[0] / det);
        gx[3 * i + 1] = gy[3 * i + 1] - d * (row[1] / det);
        gx[3 * i + 2] = d * (1.0 / det);
    }
    gx
}

/// Flux `Q = P(G_x) J⁻ᵀ det J` and mass `−ω² det J u`.
///
/// `P = 2μ G + λ tr(G) I − μ curlᵀ curl G` so that `P : conj(G_v)` is the
/// energy density `2μ ∇u:∇v̄ + λ div u div v̄ − μ curl u · curl v̄`.
#[inline]
pub(crate) fn flux<T: Scalar>(mat: &Material, row: [f64; 3], f: &[T; NF]) -> [T; NF] {
    let det = 1.0 + row[2];
    let gy: [T; 9] = std::array::from_fn(|k| f[k]);
    let g = physical_gradient(&gy, row);
    let mut p = [T::zero(); 9];
    for k in 0..9 {
        p[k] = g[k] * (2.0 * mat.mu);
    }
    let tr = (g[0] + g[4] + g[8]) * mat.lambda;
    p[0] = p[0] + tr;
    p[4] = p[4] + tr;
    p[8] = p[8] + tr;
    let c0 = (g[7] - g[5]) * mat.mu;
    let c1 = (g[2] - g[6]) * mat.mu;
    let c2 = (g[3] - g[1]) * mat.mu;
    p[7] = p[7] - c0;
    p[5] = p[5] + c0;
    p[2] = p[2] - c1;
    p[6] = p[6] + c1;
    p[3] = p[3] - c2;
    p[1] = p[1] + c2;
    let mut out = [T::zero(); NF];
    for i in 0..3 {
        let s = p[3 * i] * row[0] + p[3 * i + 1] * row[1] + p[3 * i + 2] * row[2];
        out[3 * i] = p[3 * i] * det;
        out[3 * i + 1] = p[3 * i + 1] * det;
        out[3 * i + 2] = p[3 * i + 2] * det - s;
        out[9 + i] = f[9 + i] * (-mat.w2 * det);
    }
    out
}

/// The flux as a real 12×12 matrix, `K[out][in]`.
pub(crate) fn flux_matrix(mat: &Material, row: [f64; 3]) -> [[f64; NF]; NF] {
    let mut k = [[0.0; NF]; NF];
    for j in 0..NF {
        let mut e = [0.0; NF];
        e[j] = 1.0;
        let col = flux(mat, row, &e);
        for i in 0..NF {
            k[i][j] = col[i];
        }
    }
    k
}

/// Features of `ψ e_c e^{iξ·y′}` given `ψ` and `ψ′` at a point. Test
/// features are the conjugates.
#[inline]
pub(crate) fn basis_features(xi: [f64; 2], c: usize, psi: f64, dpsi: f64) -> [C64; NF] {
    let mut f = [C64::new(0.0, 0.0); NF];
    f[3 * c] = C64::new(0.0, xi[0] * psi);
    f[3 * c + 1] = C64::new(0.0, xi[1] * psi);
    f[3 * c + 2] = C64::new(dpsi, 0.0);
    f[9 + c] = C64::new(psi, 0.0);
    f
}

/// Features of a single-mode field with coefficient `u` and `∂3 u = du`.
#[inline]
pub(crate) fn mode_features(xi: [f64; 2], u: &[C64; 3], du: &[C64; 3]) -> [C64; NF] {
    let mut f = [C64::new(0.0, 0.0); NF];
    for c in 0..3 {
        f[3 * c] = C64::new(0.0, xi[0]) * u[c];
        f[3 * c + 1] = C64::new(0.0, xi[1]) * u[c];
        f[3 * c + 2] = du[c];
        f[9 + c] = u[c];
    }
    f
}
