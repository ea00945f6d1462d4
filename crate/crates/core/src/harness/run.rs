use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::problem::Problem;
use crate::config::{RunConfig, SweepAxis};
use crate::params::{bound_constants, BoundReport};
use crate::solver::{
    assemble_system, energy_balance, poincare_check, rellich_residual, source_norms, vh_norm_physical, DiscreteField,
    EnergyBalance, LinearSystem, PoincareCheck, RellichReport, SolveStats,
};
use crate::{Error, Result};

/// Energy-balance tolerance enforced on every solve.
pub const ENERGY_TOL: f64 = 1e-8;
/// Lower bound accepted for the radiated power.
pub const POWER_FLOOR: f64 = -1e-12;
/// Slack of the Poincaré check.
pub const POINCARE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub solve: SolveStats,
    pub energy: EnergyBalance,
    pub poincare: PoincareCheck,
    /// Only on untransformed flat strips.
    pub rellich: Option<RellichReport>,
}

impl Diagnostics {
    /// Human-readable list of failed checks.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.energy.residual <= ENERGY_TOL) {
            v.push(format!("energy balance residual {:.3e} exceeds {ENERGY_TOL:e}", self.energy.residual));
        }
        if !(self.energy.radiated_power >= POWER_FLOOR) {
            v.push(format!("radiated power {:.3e} is negative", self.energy.radiated_power));
        }
        if !self.poincare.holds(POINCARE_SLACK) {
            v.push(format!("Poincaré inequality fails: {:.6e} > {:.6e}", self.poincare.lhs, self.poincare.rhs));
        }
        v
    }
}

/// Outcome of one deterministic solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    /// Grid estimate of the surface Lipschitz constant.
    pub lipschitz: f64,
    pub u_vh: f64,
    pub g_l2: f64,
    pub g_h1: f64,
    pub bound: BoundReport,
    pub diagnostics: Diagnostics,
    pub violations: Vec<String>,
    pub wall_time_s: f64,
}

impl RunReport {
    /// `‖u‖_{V_h} / (total_bound ‖g‖_{H¹})`.
    pub fn measured_ratio(&self) -> f64 {
        self.bound.measured_ratio.unwrap_or(0.0)
    }
}

/// Solve an assembled system and run the per-solve diagnostics.
pub fn solve_and_check(sys: &LinearSystem, tol: f64, restart: usize) -> Result<(DiscreteField, Diagnostics)> {
    let mut cfg = sys.default_gmres();
    cfg.tol = tol;
    cfg.restart = restart;
    let (u, solve) = sys.solve_with(&cfg)?;
    let energy = energy_balance(&u, sys)?;
    let poincare = poincare_check(&u)?;
    let strip = sys.strip();
    let rellich = if strip.is_uncoupled() && strip.surface().spec().offset == strip.level() && sys.mesh().nz() >= 2 {
        Some(rellich_residual(&u, sys.source(), strip, sys.params())?)
    } else {
        None
    };
    Ok((u, Diagnostics { solve, energy, poincare, rellich }))
}

/// Deterministic run returning the solution too.
pub fn deterministic_run_with_field(cfg: &RunConfig) -> Result<(RunReport, DiscreteField)> {
    let start = Instant::now();
    let pb = Problem::from_config(cfg)?;
    let strip = pb.strip()?;
    let sys = assemble_system(&pb.mesh, &pb.params, &strip, &pb.source)?;
    let d = &cfg.discretization;
    let (u, diagnostics) = solve_and_check(&sys, d.tol, d.restart)?;
    let u_vh = vh_norm_physical(&u, &strip)?;
    let (g_l2, g_h1) = source_norms(&pb.source, pb.geom.cell);
    let mut bound = bound_constants(&pb.params, &pb.geom, pb.surface.lipschitz_bound(), cfg.run.generic_c)?;
    bound.measured_ratio = Some(if g_h1 > 0.0 { u_vh / (bound.total_bound * g_h1) } else { 0.0 });
    let violations = diagnostics.violations();
    let report = RunReport {
        config: cfg.clone(),
        lipschitz: pb.surface.lipschitz(),
        u_vh,
        g_l2,
        g_h1,
        bound,
        diagnostics,
        violations,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok((report, u))
}

/// Build, solve and diagnose the configured problem once.
pub fn deterministic_run(cfg: &RunConfig) -> Result<RunReport> {
    deterministic_run_with_field(cfg).map(|r| r.0)
}

/// One point of a parameter sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub report: Option<RunReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub axis: SweepAxis,
    pub rows: Vec<SweepRow>,
}

/// The configuration with one sweep coordinate replaced.
pub fn sweep_config(cfg: &RunConfig, axis: SweepAxis, value: f64) -> RunConfig {
    let mut c = cfg.clone();
    match axis {
        SweepAxis::Omega => c.physics.omega = value,
        SweepAxis::H => c.geometry.h = value,
        SweepAxis::LAmplitude => {
            c.surface.terms = cfg
                .surface
                .terms
                .iter()
                .map(|t| crate::geometry::FourierTerm { cos: t.cos * value, sin: t.sin * value, ..*t })
                .collect();
        }
    }
    c.sweep = None;
    c
}

/// Run one deterministic solve per value. Failures are recorded per point
/// and the sweep continues; rows keep the order of `values`.
pub fn parameter_sweep(cfg: &RunConfig, axis: SweepAxis, values: &[f64]) -> Result<SweepTable> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Constraint("sweep values must be finite".into()));
    }
    let rows = values
        .par_iter()
        .map(|&value| match deterministic_run(&sweep_config(cfg, axis, value)) {
            Ok(r) => SweepRow { value, report: Some(r), error: None },
            Err(e) => SweepRow { value, report: None, error: Some(e.to_string()) },
        })
        .collect();
    Ok(SweepTable { axis, rows })
}
