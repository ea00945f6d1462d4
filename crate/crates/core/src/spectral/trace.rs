use serde::{Deserialize, Serialize};

use super::grid::{SpectralGrid, SpectralTransform};
use super::symbol::{branch_pair, dtn_symbol, propagator_matrices, rho, ModeAmplitude};
use crate::linalg::mat3_mul_vec;
use crate::params::ElasticParams;
use crate::{Error, Result, C64};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// A complex 3-vector field sampled on the collocation grid of the plane
/// `x3 = height`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTrace {
    pub grid: SpectralGrid,
    pub height: f64,
    pub values: Vec<[C64; 3]>,
}

impl BoundaryTrace {
    pub fn new(grid: SpectralGrid, height: f64, values: Vec<[C64; 3]>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::Constraint(format!(
                "trace has {} samples, grid needs {}",
                values.len(),
                grid.n_points()
            )));
        }
        Ok(Self { grid, height, values })
    }

    pub fn zeros(grid: SpectralGrid, height: f64) -> Self {
        let n = grid.n_points();
        Self { grid, height, values: vec![[ZERO; 3]; n] }
    }

    /// Build from normalized Fourier coefficients (amplitudes of `e^{iξ·x'}`).
    pub fn from_fourier(grid: SpectralGrid, height: f64, coeffs: &[[C64; 3]]) -> Self {
        let t = SpectralTransform::new(&grid);
        let values = components_to_values(&t, coeffs);
        Self { grid, height, values }
    }

    /// Discrete Fourier coefficients, plain-sum forward convention:
    /// `Σ_x u(x) e^{−iξ·x}`.
    pub fn coefficients(&self) -> Vec<[C64; 3]> {
        let n = self.grid.n_points() as f64;
        self.fourier().into_iter().map(|c| c.map(|v| v * n)).collect()
    }

    /// Normalized coefficients: the amplitude of each `e^{iξ·x'}`.
    pub fn fourier(&self) -> Vec<[C64; 3]> {
        let t = SpectralTransform::new(&self.grid);
        components_to_coeffs(&t, &self.values)
    }
}

pub(crate) fn components_to_values(t: &SpectralTransform, coeffs: &[[C64; 3]]) -> Vec<[C64; 3]> {
    let comps: Vec<Vec<C64>> = (0..3).map(|c| t.values(&coeffs.iter().map(|v| v[c]).collect::<Vec<_>>())).collect();
    (0..comps[0].len()).map(|p| [comps[0][p], comps[1][p], comps[2][p]]).collect()
}

pub(crate) fn components_to_coeffs(t: &SpectralTransform, values: &[[C64; 3]]) -> Vec<[C64; 3]> {
    let comps: Vec<Vec<C64>> = (0..3).map(|c| t.coeffs(&values.iter().map(|v| v[c]).collect::<Vec<_>>())).collect();
    (0..comps[0].len()).map(|m| [comps[0][m], comps[1][m], comps[2][m]]).collect()
}

/// Per-mode amplitudes of the upward P and S parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeAmplitudes {
    pub grid: SpectralGrid,
    pub modes: Vec<ModeAmplitude>,
}

pub fn decompose_trace(trace: &BoundaryTrace, params: &ElasticParams) -> Result<ModeAmplitudes> {
    let coeffs = trace.fourier();
    let modes = coeffs
        .iter()
        .enumerate()
        .map(|(m, u)| ModeAmplitude::from_boundary(trace.grid.xi(m), u, params))
        .collect::<Result<Vec<_>>>()?;
    Ok(ModeAmplitudes { grid: trace.grid.clone(), modes })
}

/// Evaluate the upward-radiating field generated by `trace` on the plane
/// `x3 ≥ trace.height`.
pub fn extend_field(trace: &BoundaryTrace, x3: f64, params: &ElasticParams) -> Result<Vec<[C64; 3]>> {
    let t = x3 - trace.height;
    if t < 0.0 {
        return Err(Error::Constraint(format!(
            "extension only valid above the trace plane (x3 = {x3} < h = {})",
            trace.height
        )));
    }
    let grid = &trace.grid;
    let coeffs = trace.fourier();
    let out: Vec<[C64; 3]> = coeffs.iter().enumerate().map(|(m, u)| propagate_mode(grid.xi(m), u, t, params)).collect();
    let tr = SpectralTransform::new(grid);
    Ok(components_to_values(&tr, &out))
}

fn propagate_mode(xi: [f64; 2], u: &[C64; 3], t: f64, params: &ElasticParams) -> [C64; 3] {
    let (b, g) = branch_pair(xi, params);
    let r = rho(xi, params);
    let (mp, ms) = propagator_matrices(xi, params);
    let ep = (C64::i() * b * t).exp();
    let es = (C64::i() * g * t).exp();
    let a = mat3_mul_vec(&mp, u);
    let s = mat3_mul_vec(&ms, u);
    [0, 1, 2].map(|k| (a[k] * ep + s[k] * es) / r)
}

/// Pointwise evaluation of the upward field at an arbitrary `(x1, x2, x3)`.
pub fn evaluate_upward(trace: &BoundaryTrace, x: [f64; 3], params: &ElasticParams) -> Result<[C64; 3]> {
    let t = x[2] - trace.height;
    if t < 0.0 {
        return Err(Error::Constraint("evaluation point below the trace plane".into()));
    }
    let coeffs = trace.fourier();
    let mut acc = [ZERO; 3];
    for (m, u) in coeffs.iter().enumerate() {
        let xi = trace.grid.xi(m);
        let v = propagate_mode(xi, u, t, params);
        let ph = C64::from_polar(1.0, xi[0] * x[0] + xi[1] * x[1]);
        for k in 0..3 {
            acc[k] += v[k] * ph;
        }
    }
    Ok(acc)
}

/// Traction on the trace plane produced by the DtN map: forward transform,
/// multiply by `i M(ξ)` per mode, inverse transform.
pub fn apply_dtn(trace: &BoundaryTrace, params: &ElasticParams) -> BoundaryTrace {
    let coeffs = trace.fourier();
    let out: Vec<[C64; 3]> =
        coeffs.iter().enumerate().map(|(m, u)| dtn_symbol(trace.grid.xi(m), params).apply(u)).collect();
    let tr = SpectralTransform::new(&trace.grid);
    BoundaryTrace { grid: trace.grid.clone(), height: trace.height, values: components_to_values(&tr, &out) }
}

/// Both sides of the flux identity on the trace plane, per unit cell:
/// `Im Σ conj(û)·iMû` and `ω² (Σ_{|ξ|<k_p} β|A_p|² + Σ_{|ξ|<k_s} γ|Ã_s|²)`.
pub fn flux_both_ways(trace: &BoundaryTrace, params: &ElasticParams) -> Result<(f64, f64)> {
    let coeffs = trace.fourier();
    let mut direct = 0.0;
    let mut modal = 0.0;
    for (m, u) in coeffs.iter().enumerate() {
        let xi = trace.grid.xi(m);
        let t = dtn_symbol(xi, params).apply(u);
        direct += (0..3).map(|k| (u[k].conj() * t[k]).im).sum::<f64>();
        modal += radiated_power_mode(xi, u, params)?;
    }
    Ok((direct, modal))
}

/// Power carried upward by one mode, `ω²(β|A_p|² + γ|Ã_s|²)` restricted to
/// propagating parts.
pub fn radiated_power_mode(xi: [f64; 2], u: &[C64; 3], params: &ElasticParams) -> Result<f64> {
    let w2 = params.omega() * params.omega();
    let n2 = xi[0] * xi[0] + xi[1] * xi[1];
    let (b, g) = branch_pair(xi, params);
    let amp = ModeAmplitude::from_boundary(xi, u, params)?;
    let mut p = 0.0;
    if n2 < params.kp() * params.kp() {
        p += b.re * amp.a_p.norm_sqr();
    }
    if n2 < params.ks() * params.ks() {
        p += g.re * amp.a_s_tilde.iter().map(|v| v.norm_sqr()).sum::<f64>();
    }
    Ok(w2 * p)
}
