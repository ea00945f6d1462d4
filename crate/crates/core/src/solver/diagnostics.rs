use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::DiscreteField;
use super::mesh::{gauss_legendre, StripMesh};
use super::norms::norm_parts;
use super::pointwise::{flux, mode_features};
use super::strip::MappedStrip;
use super::system::{assemble_system, LinearSystem};
use crate::geometry::{SourceSpec, SurfaceProfile};
use crate::linalg::{dot, min_generalized_eig};
use crate::params::{stability_constants, ElasticParams};
use crate::spectral::radiated_power_mode;
use crate::{Error, Result, C64};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Floor for the denominator of the energy-balance residual.
pub const ENERGY_EPS: f64 = 1e-14;

/// Both sides of the flux identity obtained by testing the discrete problem
/// with the solution itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBalance {
    /// `Im ∫_{Γ_h} conj(u)·𝓣u`
    pub flux: f64,
    /// `Im ∫ g·ū`
    pub source_work: f64,
    /// `|flux − source_work| / max(|source_work|, ε)`
    pub residual: f64,
    /// `ω² (Σ β|A_p|² + Σ γ|Ã_s|²)` over propagating modes.
    pub radiated_power: f64,
}

/// Energy balance of a solution of `system`.
pub fn energy_balance(field: &DiscreteField, system: &LinearSystem) -> Result<EnergyBalance> {
    let mesh = system.mesh();
    let area = mesh.grid().cell_area();
    let u = field.unknowns();
    let source_work = -area * dot(&u, system.rhs()).im;
    let mut flux = 0.0;
    let mut power = 0.0;
    for (m, c) in field.top_coeffs().iter().enumerate() {
        let t = system.dtn_matrix(m);
        for i in 0..3 {
            let tu: C64 = (0..3).map(|j| t[i][j] * c[j]).sum();
            flux += (c[i].conj() * tu).im;
        }
        power += radiated_power_mode(mesh.grid().xi(m), c, system.params())?;
    }
    flux *= area;
    power *= area;
    let residual = (flux - source_work).abs() / source_work.abs().max(ENERGY_EPS);
    Ok(EnergyBalance { flux, source_work, residual, radiated_power: power })
}

/// The relative energy-balance mismatch alone.
pub fn energy_balance_residual(field: &DiscreteField, system: &LinearSystem) -> Result<f64> {
    Ok(energy_balance(field, system)?.residual)
}

/// Outcome of the coercivity probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoercivityReport {
    pub n_probes: usize,
    /// `min Re B(v, v) / ‖v‖²_{V_h}` over the random probes.
    pub probe_min: f64,
    /// Smallest generalized eigenvalue of the Hermitian part against the
    /// `V_h` Gram matrix: the infimum over the whole discrete space.
    pub rayleigh_min: f64,
    /// Smallest `C0` consistent with `‖∇v‖² ≥ ‖v‖²_{V_h}/C0` and
    /// `‖v‖²_{H^{1/2}(Γ_h)} ≤ C0 ‖v‖²_{V_h}` on the probes.
    pub c0_estimate: f64,
    /// `μ/C0 − ω C0 C_K − ω² (h − m)` with the estimated `C0`.
    pub theory_lower: f64,
}

/// Probe `Re B(v, v)/‖v‖²_{V_h}` on random fields over the flat strip
/// `[z0, h]` of `mesh`.
pub fn coercivity_probe(
    mesh: &StripMesh,
    params: &ElasticParams,
    n_probes: usize,
    seed: u64,
) -> Result<CoercivityReport> {
    if n_probes == 0 {
        return Err(Error::Constraint("n_probes must be positive".into()));
    }
    let grid = mesh.grid();
    let f0 = SurfaceProfile::flat(mesh.z0(), grid.cell());
    let strip = MappedStrip::flat(f0, mesh.top())?;
    let none = SourceSpec { amplitude: 0.0, center: 0.0, width: 1.0, support: [0.0, 1.0], modes: Vec::new() };
    let sys = assemble_system(mesh, params, &strip, &none)?;
    let n = mesh.n_unknowns();
    let area = grid.cell_area();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut probe_min, mut c0) = (f64::INFINITY, 0.0_f64);
    let mut y = vec![ZERO; n];
    for _ in 0..n_probes {
        // Random amplitudes with a random decay rate across modes and nodes.
        let decay = rng.gen::<f64>() * 2.0;
        let v: Vec<C64> = (0..n)
            .map(|i| {
                let m = i / mesh.block_size();
                let xi = grid.xi(m);
                let w = (-(decay) * xi[0].hypot(xi[1])).exp();
                C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5) * w
            })
            .collect();
        crate::linalg::LinearOperator::apply(&sys, &v, &mut y);
        let b = dot(&v, &y).re * area;
        let field = DiscreteField::from_unknowns(mesh, &v)?;
        let p = norm_parts(&field);
        let vh2 = p.l2_sq + p.grad_sq;
        probe_min = probe_min.min(b / vh2);
        let half: f64 = field
            .top_coeffs()
            .iter()
            .enumerate()
            .map(|(m, c)| {
                let xi = grid.xi(m);
                (1.0 + xi[0] * xi[0] + xi[1] * xi[1]).sqrt() * c.iter().map(|z| z.norm_sqr()).sum::<f64>()
            })
            .sum::<f64>()
            * area;
        c0 = c0.max(vh2 / p.grad_sq).max(half / vh2);
    }
    let rayleigh_min = (0..grid.n_modes())
        .into_par_iter()
        .map(|m| mode_rayleigh_min(&sys, m))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let sc = stability_constants(params);
    let w = params.omega();
    let theory_lower = params.mu() / c0 - w * c0 * sc.c_k - w * w * (mesh.top() - mesh.z0());
    Ok(CoercivityReport { n_probes, probe_min, rayleigh_min, c0_estimate: c0, theory_lower })
}

fn mode_rayleigh_min(sys: &LinearSystem, m: usize) -> Result<f64> {
    let mesh = sys.mesh();
    let n = mesh.block_size();
    let blk = sys.block(m);
    let a = DMatrix::from_fn(n, n, |i, j| (blk.get(i, j) + blk.get(j, i).conj()) * 0.5);
    let xi = mesh.grid().xi(m);
    let xi2 = xi[0] * xi[0] + xi[1] * xi[1];
    let mut g = DMatrix::from_element(n, n, ZERO);
    for q in mesh.quad_points() {
        for a_ in 0..2 {
            for b_ in 0..2 {
                let (ka, kb) = (q.elem + a_, q.elem + b_);
                if ka == 0 || kb == 0 {
                    continue;
                }
                let v = q.weight * ((1.0 + xi2) * q.psi[a_] * q.psi[b_] + q.dpsi[a_] * q.dpsi[b_]);
                for c in 0..3 {
                    g[((ka - 1) * 3 + c, (kb - 1) * 3 + c)] += C64::new(v, 0.0);
                }
            }
        }
    }
    min_generalized_eig(&a, &g).ok_or_else(|| Error::Internal("Gram matrix is not positive definite".into()))
}

/// Both sides of the Rellich identity on a flat strip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RellichReport {
    /// `2 Re ∫ g·∂3ū`
    pub volume: f64,
    /// `∫_{Γ_h} b(u) − ∫_Γ b(u)` with `b = 2 Re(Tu·∂3ū) − ℰ(u, ū) + ω²|u|²`.
    pub boundary: f64,
    pub residual: f64,
}

/// Rellich identity residual for a solution on the untransformed flat strip.
pub fn rellich_residual(
    field: &DiscreteField,
    g: &SourceSpec,
    strip: &MappedStrip,
    params: &ElasticParams,
) -> Result<RellichReport> {
    if !(strip.is_uncoupled() && strip.surface().spec().offset == strip.level()) {
        return Err(Error::Unsupported("the Rellich diagnostic needs a flat surface with f = f0".into()));
    }
    let grid = field.mesh().grid().clone();
    rellich_terms(field, params, |m, z| g.mode_profile(grid.mode_index(m), z))
}

/// Rellich identity with the volume term driven by arbitrary per-mode
/// coefficients `g_m(z)` (for manufactured fields).
pub fn rellich_terms(
    field: &DiscreteField,
    params: &ElasticParams,
    g: impl Fn(usize, f64) -> [C64; 3],
) -> Result<RellichReport> {
    let mesh = field.mesh();
    let grid = mesh.grid();
    let nodes = mesh.nodes();
    let nz = mesh.nz();
    if nz < 2 {
        return Err(Error::Constraint("the Rellich diagnostic needs at least two elements".into()));
    }
    let (gx, gw) = gauss_legendre(5)?;
    let mat = super::system::material(params);
    let (lam, mu, w2) = (params.lambda(), params.mu(), params.omega() * params.omega());
    let (mut vol, mut bnd, mut scale) = (0.0, 0.0, 0.0);
    for m in 0..grid.n_modes() {
        let xi = grid.xi(m);
        for e in 0..nz {
            let len = nodes[e + 1] - nodes[e];
            let (_, du) = field.eval_in(m, e, [0.0, 0.0], [-1.0 / len, 1.0 / len]);
            for (s, w) in gx.iter().zip(&gw) {
                let z = nodes[e] + 0.5 * (s + 1.0) * len;
                let gv = g(m, z);
                vol += 0.5 * w * len * 2.0 * (0..3).map(|c| (gv[c] * du[c].conj()).re).sum::<f64>();
            }
        }
        let ends = [(0usize, -1.0), (nz, 1.0)];
        for (k, sign) in ends {
            let u = field.node(m, k);
            let du = one_sided_derivative(field, m, k);
            let i = C64::new(0.0, 1.0);
            let t = [
                (du[0] + i * xi[0] * u[2]) * mu,
                (du[1] + i * xi[1] * u[2]) * mu,
                du[2] * (lam + 2.0 * mu) + (i * xi[0] * u[0] + i * xi[1] * u[1]) * lam,
            ];
            let f = mode_features(xi, &u, &du);
            let q = flux(&mat, [0.0; 3], &f);
            let energy: f64 = (0..9).map(|k| (q[k] * f[k].conj()).re).sum();
            let tdu: f64 = 2.0 * (0..3).map(|c| (t[c] * du[c].conj()).re).sum::<f64>();
            let uu: f64 = u.iter().map(|v| v.norm_sqr()).sum();
            let b = tdu - energy + w2 * uu;
            bnd += sign * b;
            scale += tdu.abs() + energy.abs() + w2 * uu;
        }
    }
    let area = grid.cell_area();
    let (vol, bnd, scale) = (vol * area, bnd * area, scale * area);
    let denom = vol.abs().max(scale).max(1e-300);
    Ok(RellichReport { volume: vol, boundary: bnd, residual: (vol - bnd).abs() / denom })
}

/// Second-order one-sided `∂3` at the first or last node.
fn one_sided_derivative(field: &DiscreteField, m: usize, k: usize) -> [C64; 3] {
    let nodes = field.mesh().nodes();
    let nz = field.mesh().nz();
    let (i0, i1, i2) = if k == 0 { (0, 1, 2) } else { (nz, nz - 1, nz - 2) };
    let (z0, z1, z2) = (nodes[i0], nodes[i1], nodes[i2]);
    // Derivative at z0 of the quadratic through the three nodes.
    let w0 = 1.0 / (z0 - z1) + 1.0 / (z0 - z2);
    let w1 = (z0 - z2) / ((z1 - z0) * (z1 - z2));
    let w2 = (z0 - z1) / ((z2 - z0) * (z2 - z1));
    let (a, b, c) = (field.node(m, i0), field.node(m, i1), field.node(m, i2));
    std::array::from_fn(|j| a[j] * w0 + b[j] * w1 + c[j] * w2)
}
