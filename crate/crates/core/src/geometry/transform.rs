use serde::{Deserialize, Serialize};

use super::{CutoffFn, SurfaceProfile};
use crate::{Error, Result};

/// The flattening map `H` and its Jacobian at one reference point.
///
/// `H(y) = y + α(y3 − f0(y′)) (f(y′) − f0(y′)) e3`, so the Jacobian is the
/// rank-one update `I + e3 ⊗ (J1, J2, J3)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformData {
    pub x: [f64; 3],
    pub row: [f64; 3],
    pub jac: [[f64; 3]; 3],
    pub det: f64,
    pub jac_inv: [[f64; 3]; 3],
}

impl TransformData {
    /// Assemble from the point image and the perturbation row `(J1, J2, J3)`.
    pub fn from_row(x: [f64; 3], row: [f64; 3]) -> Self {
        let mut jac = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let mut jac_inv = jac;
        let det = 1.0 + row[2];
        for j in 0..3 {
            jac[2][j] += row[j];
            jac_inv[2][j] -= row[j] / det;
        }
        Self { x, row, jac, det, jac_inv }
    }
}

/// `(J1, J2, J3)` at height `t = y3 − f0` above the reference surface, given
/// `d = f − f0`, `∇f0` and `∇d` at the same horizontal point.
pub fn transform_row(cutoff: &CutoffFn, t: f64, d: f64, grad_f0: [f64; 2], grad_d: [f64; 2]) -> [f64; 3] {
    let a = cutoff.value(t);
    let s = cutoff.slope(t);
    [-s * grad_f0[0] * d + a * grad_d[0], -s * grad_f0[1] * d + a * grad_d[1], s * d]
}

/// Evaluate `H` and its Jacobian at `y`; fails when `|J3| ≥ 1`.
pub fn transform_map(y: [f64; 3], f0: &SurfaceProfile, f: &SurfaceProfile, cutoff: &CutoffFn) -> Result<TransformData> {
    let yp = [y[0], y[1]];
    let base = f0.value(yp);
    let d = f.value(yp) - base;
    let g0 = f0.gradient(yp);
    let gf = f.gradient(yp);
    let t = y[2] - base;
    let row = transform_row(cutoff, t, d, g0, [gf[0] - g0[0], gf[1] - g0[1]]);
    if row[2].abs() >= 1.0 {
        return Err(Error::SingularTransform(y[0], y[1], y[2], row[2].abs()));
    }
    let x = [y[0], y[1], y[2] + cutoff.value(t) * d];
    Ok(TransformData::from_row(x, row))
}

/// Invert `H` at a physical point by a monotone root-find in `y3`.
pub fn inverse_transform(x: [f64; 3], f0: &SurfaceProfile, f: &SurfaceProfile, cutoff: &CutoffFn) -> Result<[f64; 3]> {
    let xp = [x[0], x[1]];
    let base = f0.value(xp);
    let d = f.value(xp) - base;
    if d.abs() * cutoff.max_slope() >= 1.0 {
        return Err(Error::SingularTransform(x[0], x[1], x[2], d.abs() * cutoff.max_slope()));
    }
    let phi = |y3: f64| y3 + cutoff.value(y3 - base) * d - x[2];
    let (mut lo, mut hi) = (x[2] - d.abs() - 1.0, x[2] + d.abs() + 1.0);
    let tol = 1e-15 * (1.0 + x[2].abs());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= tol {
            break;
        }
    }
    Ok([x[0], x[1], 0.5 * (lo + hi)])
}
