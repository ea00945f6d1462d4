use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::problem::Problem;
use super::run::{solve_and_check, Diagnostics};
use crate::config::RunConfig;
use crate::geometry::{sample_ensemble, RandomSample};
use crate::params::{bound_constants, BoundReport};
use crate::solver::{assemble_system, norm_parts, source_norms_reference, MappedStrip};
use crate::{Error, Result};

/// Per-sample record of a Monte Carlo run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McSample {
    pub sample_id: usize,
    pub rejections: usize,
    pub lipschitz: f64,
    /// `‖ũ‖²_{H¹}` on the reference strip.
    pub u_sq: Option<f64>,
    /// `‖g̃‖²_{H¹}` on the reference strip.
    pub g_sq: Option<f64>,
    pub iterations: Option<usize>,
    pub energy_residual: Option<f64>,
    pub radiated_power: Option<f64>,
    /// Both sides of the Poincaré inequality, `[lhs, rhs]`.
    pub poincare: Option<[f64; 2]>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub seed: u64,
    pub n_samples: usize,
    pub n_completed: usize,
    pub completeness: f64,
    pub mean_u_sq: f64,
    pub mean_g_sq: f64,
    pub se_u_sq: f64,
    pub se_g_sq: f64,
    /// `L0 = M0 + L(f0)` used in the bound constants.
    pub l0: f64,
    pub bound: BoundReport,
    /// `(h − m + 2)² (C4 + C5 + C6)²`
    pub bound_factor: f64,
    /// `mean_u_sq / (bound_factor · mean_g_sq)`
    pub ratio: f64,
    pub samples: Vec<McSample>,
    pub violations: Vec<String>,
}

fn mean_and_se(v: &[f64]) -> (f64, f64) {
    let n = v.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = v.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Solve one sample on the reference strip and return its squared norms.
pub fn solve_sample(pb: &Problem, cfg: &RunConfig, sample: &RandomSample) -> McSample {
    let mut rec = McSample {
        sample_id: sample.sample_id,
        rejections: sample.rejections,
        lipschitz: sample.surface.lipschitz(),
        u_sq: None,
        g_sq: None,
        iterations: None,
        energy_residual: None,
        radiated_power: None,
        poincare: None,
        error: None,
    };
    let run = || -> Result<(f64, f64, Diagnostics)> {
        let strip = MappedStrip::new(pb.f0.clone(), sample.surface.clone(), pb.cutoff)?;
        let sys = assemble_system(&pb.mesh, &pb.params, &strip, &sample.source)?;
        let d = &cfg.discretization;
        let (u, diag) = solve_and_check(&sys, d.tol, d.restart)?;
        let u_sq = norm_parts(&u).vh().powi(2);
        let pd = pb.mesh.grid().padded_dims();
        let dims = [2 * pd[0], 2 * pd[1]];
        let (_, g_h1) =
            source_norms_reference(&sample.source, &strip, pb.mesh.z0(), pb.mesh.top(), dims, 4 * pb.mesh.nz())?;
        Ok((u_sq, g_h1 * g_h1, diag))
    };
    match run() {
        Ok((u, g, diag)) => {
            rec.u_sq = Some(u);
            rec.g_sq = Some(g);
            rec.iterations = Some(diag.solve.iterations);
            rec.energy_residual = Some(diag.energy.residual);
            rec.radiated_power = Some(diag.energy.radiated_power);
            rec.poincare = Some([diag.poincare.lhs, diag.poincare.rhs]);
            let viol = diag.violations();
            if !viol.is_empty() {
                rec.error = Some(viol.join("; "));
            }
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

/// Monte Carlo over the configured ensemble. Failed samples are recorded and
/// excluded from the means; the report carries the completed fraction.
pub fn monte_carlo(cfg: &RunConfig, n: usize, seed: u64) -> Result<McReport> {
    if n == 0 {
        return Err(Error::Constraint("n must be at least 1".into()));
    }
    let pb = Problem::from_config(cfg)?;
    let samples =
        sample_ensemble(seed, n, cfg.surface.m0, &cfg.ensemble, &pb.geom, &pb.f0, &pb.source, pb.mesh.grid().dims())?;
    let records: Vec<McSample> = samples.par_iter().map(|s| solve_sample(&pb, cfg, s)).collect();
    let ok: Vec<&McSample> = records.iter().filter(|r| r.u_sq.is_some() && r.g_sq.is_some()).collect();
    let us: Vec<f64> = ok.iter().map(|r| r.u_sq.unwrap_or(0.0)).collect();
    let gs: Vec<f64> = ok.iter().map(|r| r.g_sq.unwrap_or(0.0)).collect();
    let (mean_u_sq, se_u_sq) = mean_and_se(&us);
    let (mean_g_sq, se_g_sq) = mean_and_se(&gs);
    let l0 = cfg.surface.m0 + pb.f0.lipschitz_bound();
    let mut bound = bound_constants(&pb.params, &pb.geom, l0, cfg.run.generic_c)?;
    let bound_factor = bound.total_bound_linear * bound.total_bound_linear;
    let ratio = if mean_g_sq > 0.0 { mean_u_sq / (bound_factor * mean_g_sq) } else { 0.0 };
    bound.measured_ratio = Some(ratio);
    let violations =
        records.iter().filter_map(|r| r.error.as_ref().map(|e| format!("sample {}: {e}", r.sample_id))).collect();
    Ok(McReport {
        seed,
        n_samples: n,
        n_completed: us.len(),
        completeness: us.len() as f64 / n as f64,
        mean_u_sq,
        mean_g_sq,
        se_u_sq,
        se_g_sq,
        l0,
        bound,
        bound_factor,
        ratio,
        samples: records,
        violations,
    })
}
