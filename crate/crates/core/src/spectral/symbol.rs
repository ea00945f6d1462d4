use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::linalg::{mat3_mul_vec, Mat3};
use crate::params::{vertical_wavenumber, ElasticParams};
use crate::{Error, Result, C64};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// `(D̃, D)`: the 4×4 boundary system and its restricted inverse.
pub type Decomposition = ([[C64; 4]; 4], [[C64; 3]; 4]);

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Vertical wavenumbers `(β, γ)` of the compressional and shear parts.
pub fn branch_pair(xi: [f64; 2], params: &ElasticParams) -> (C64, C64) {
    (vertical_wavenumber(params.kp(), xi), vertical_wavenumber(params.ks(), xi))
}

/// `ρ(ξ) = |ξ|² + βγ`, the common denominator of the decomposition and the
/// DtN symbol.
pub fn rho(xi: [f64; 2], params: &ElasticParams) -> C64 {
    let (b, g) = branch_pair(xi, params);
    re(xi[0] * xi[0] + xi[1] * xi[1]) + b * g
}

/// The 4×4 system linking `(A_p, A_s)` to `(û(h), 0)`, and the 4×3 matrix
/// mapping a boundary coefficient to the mode amplitudes.
///
/// The second matrix is obtained by solving with the first, column by column.
pub fn decomposition_matrices(xi: [f64; 2], params: &ElasticParams) -> Result<Decomposition> {
    let (b, g) = branch_pair(xi, params);
    let (x1, x2) = (re(xi[0]), re(xi[1]));
    let one = re(1.0);
    let dt = [[x1, one, ZERO, ZERO], [x2, ZERO, one, ZERO], [b, ZERO, ZERO, one], [ZERO, x1, x2, g]];
    let rho = re(xi[0] * xi[0] + xi[1] * xi[1]) + b * g;
    if rho.norm() < 1e-300 {
        return Err(Error::Internal(format!("singular decomposition at xi = {xi:?}")));
    }
    let lu = Matrix4::from_fn(|i, j| dt[i][j]).lu();
    let mut d = [[ZERO; 3]; 4];
    for col in 0..3 {
        let mut e = Vector4::zeros();
        e[col] = one;
        let sol = lu.solve(&e).ok_or_else(|| Error::Internal(format!("singular decomposition at xi = {xi:?}")))?;
        for row in 0..4 {
            d[row][col] = sol[row];
        }
    }
    Ok((dt, d))
}

/// Amplitudes of the upward compressional and shear parts of one mode.
///
/// `a_s = (ξ, γ) × ã_s`; for propagating modes `|a_s|² = k_s² |ã_s|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeAmplitude {
    pub a_p: C64,
    pub a_s: [C64; 3],
    pub a_s_tilde: [C64; 3],
}

impl ModeAmplitude {
    pub fn zero() -> Self {
        Self { a_p: ZERO, a_s: [ZERO; 3], a_s_tilde: [ZERO; 3] }
    }

    /// Decompose a boundary coefficient `û(ξ, h)` into P and S amplitudes.
    pub fn from_boundary(xi: [f64; 2], u_hat: &[C64; 3], params: &ElasticParams) -> Result<Self> {
        let (_, d) = decomposition_matrices(xi, params)?;
        let a = |r: usize| d[r][0] * u_hat[0] + d[r][1] * u_hat[1] + d[r][2] * u_hat[2];
        let a_p = a(0);
        let a_s = [a(1), a(2), a(3)];
        let (_, g) = branch_pair(xi, params);
        let k = [re(xi[0]), re(xi[1]), g];
        // ã = −(k × a_s)/(k·k), with k·k = k_s²
        let c = cross(&k, &a_s);
        let ks2 = params.ks() * params.ks();
        let a_s_tilde = [-c[0] / ks2, -c[1] / ks2, -c[2] / ks2];
        Ok(Self { a_p, a_s, a_s_tilde })
    }

    /// Boundary value reproduced by the amplitudes: `A_p (ξ, β) + A_s`.
    pub fn boundary_value(&self, xi: [f64; 2], params: &ElasticParams) -> [C64; 3] {
        let (b, _) = branch_pair(xi, params);
        [self.a_p * xi[0] + self.a_s[0], self.a_p * xi[1] + self.a_s[1], self.a_p * b + self.a_s[2]]
    }
}

pub(crate) fn cross(a: &[C64; 3], b: &[C64; 3]) -> [C64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// DtN symbol of one horizontal frequency: traction on `x3 = h` equals
/// `i M(ξ) û(ξ, h)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtnSymbol {
    pub m: Mat3,
    pub xi: [f64; 2],
    pub rho: C64,
}

impl DtnSymbol {
    /// `i M(ξ)`, the matrix that maps boundary values to traction.
    pub fn traction_matrix(&self) -> Mat3 {
        self.m.map(|row| row.map(|v| I * v))
    }

    pub fn apply(&self, u: &[C64; 3]) -> [C64; 3] {
        mat3_mul_vec(&self.traction_matrix(), u)
    }

    /// Max-entry norm `max |M_ij|`.
    pub fn max_entry(&self) -> f64 {
        self.m.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

pub fn dtn_symbol(xi: [f64; 2], params: &ElasticParams) -> DtnSymbol {
    let (b, g) = branch_pair(xi, params);
    let mu = params.mu();
    let w2 = params.omega() * params.omega();
    let ks2 = params.ks() * params.ks();
    let (x1, x2) = (xi[0], xi[1]);
    let n2 = x1 * x1 + x2 * x2;
    let rho = re(n2) + b * g;
    let gb = g - b;
    let c = re(2.0 * mu * n2 - w2) + b * g * (2.0 * mu);
    let raw = [
        [(gb * (x2 * x2) + b * ks2) * mu, -gb * (mu * x1 * x2), c * x1],
        [-gb * (mu * x1 * x2), (gb * (x1 * x1) + b * ks2) * mu, c * x2],
        [-c * x1, -c * x2, g * w2],
    ];
    DtnSymbol { m: raw.map(|row| row.map(|v| v / rho)), xi, rho }
}

/// Numerators of the compressional and shear propagators, `(M_p, M_s)`,
/// with `M_p + M_s = ρ I`.
pub fn propagator_matrices(xi: [f64; 2], params: &ElasticParams) -> (Mat3, Mat3) {
    let (b, g) = branch_pair(xi, params);
    let (x1, x2) = (re(xi[0]), re(xi[1]));
    let bg = b * g;
    let n2 = x1 * x1 + x2 * x2;
    let mp = [[x1 * x1, x1 * x2, x1 * g], [x1 * x2, x2 * x2, x2 * g], [x1 * b, x2 * b, bg]];
    let ms = [[bg + x2 * x2, -x1 * x2, -g * x1], [-x1 * x2, bg + x1 * x1, -g * x2], [-x1 * b, -x2 * b, n2]];
    (mp, ms)
}

/// Traction `T u` on a horizontal plane (normal `e3`) of the plane wave
/// `v e^{i k·x}`.
fn plane_wave_traction(v: &[C64; 3], k: &[C64; 3], mu: f64, lambda: f64) -> [C64; 3] {
    let div = I * (k[0] * v[0] + k[1] * v[1] + k[2] * v[2]);
    let ik = [I * k[0], I * k[1], I * k[2]];
    let curl = cross(&ik, v);
    let e3 = [ZERO, ZERO, re(1.0)];
    let e3c = cross(&e3, &curl);
    let mut t = [ZERO; 3];
    for j in 0..3 {
        t[j] = I * k[2] * v[j] * (2.0 * mu) + e3c[j] * mu;
    }
    t[2] += div * lambda;
    t
}

/// Traction on `x3 = h` of the single-mode upward field with the given
/// amplitudes, computed by differentiating the plane waves directly.
pub fn mode_traction(xi: [f64; 2], amp: &ModeAmplitude, params: &ElasticParams) -> [C64; 3] {
    let (b, g) = branch_pair(xi, params);
    let kp = [re(xi[0]), re(xi[1]), b];
    let ks = [re(xi[0]), re(xi[1]), g];
    let vp = [amp.a_p * kp[0], amp.a_p * kp[1], amp.a_p * kp[2]];
    let tp = plane_wave_traction(&vp, &kp, params.mu(), params.lambda());
    let ts = plane_wave_traction(&amp.a_s, &ks, params.mu(), params.lambda());
    [tp[0] + ts[0], tp[1] + ts[1], tp[2] + ts[2]]
}
