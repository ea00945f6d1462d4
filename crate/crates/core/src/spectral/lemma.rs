use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::symbol::{branch_pair, dtn_symbol};
use crate::linalg::min_eig_hermitian_part;
use crate::params::{stability_constants, ElasticParams, StabilityConstants};
use crate::{Error, Result, C64};

/// Relative slack applied to every inequality checked here.
pub const LEMMA_SLACK: f64 = 1e-12;

const MAX_RECORDED: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolViolation {
    pub check: String,
    pub xi: [f64; 2],
    pub value: f64,
    pub limit: f64,
}

/// Outcome of a sampled check of the DtN symbol properties.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolLemmaReport {
    pub params: ElasticParams,
    pub constants: StabilityConstants,
    pub n_samples: usize,
    pub seed: u64,
    /// Smallest eigenvalue of `Re(−iM)` over `Kω < |ξ| ≤ 10Kω`.
    pub min_eig_outer: f64,
    /// Largest `max|M_ij| / (C_K ω)` over `|ξ| ≤ Kω`.
    pub max_ratio_inner: f64,
    pub rho_band_checks: usize,
    pub gamma_beta_checks: usize,
    pub n_violations: usize,
    /// First few violations, in sampling order.
    pub violations: Vec<SymbolViolation>,
}

impl SymbolLemmaReport {
    pub fn passed(&self) -> bool {
        self.n_violations == 0
    }
}

fn sample_radius(rng: &mut ChaCha8Rng, r0: f64, r1: f64) -> f64 {
    // uniform in area on the annulus r0 < r ≤ r1
    let u: f64 = 1.0 - rng.gen::<f64>();
    (r0 * r0 + u * (r1 * r1 - r0 * r0)).sqrt()
}

/// Sample `n_samples` frequencies on each side of `|ξ| = Kω` and check
/// positivity of `Re(−iM)` outside, the bound `‖M‖ ≤ C_K ω` inside, and the
/// band estimates for `|ρ|` and `|γ − β|`.
pub fn verify_symbol_lemma(params: &ElasticParams, n_samples: usize, seed: u64) -> Result<SymbolLemmaReport> {
    if n_samples == 0 {
        return Err(Error::Constraint("n_samples must be positive".into()));
    }
    let consts = stability_constants(params);
    let w = params.omega();
    let (kp, ks) = (params.kp(), params.ks());
    let kw = consts.k * w;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SymbolLemmaReport {
        params: *params,
        constants: consts,
        n_samples,
        seed,
        min_eig_outer: f64::INFINITY,
        max_ratio_inner: 0.0,
        rho_band_checks: 0,
        gamma_beta_checks: 0,
        n_violations: 0,
        violations: Vec::new(),
    };
    let flag = |r: &mut SymbolLemmaReport, check: &str, xi: [f64; 2], value: f64, limit: f64| {
        r.n_violations += 1;
        if r.violations.len() < MAX_RECORDED {
            r.violations.push(SymbolViolation { check: check.to_string(), xi, value, limit });
        }
    };

    for _ in 0..n_samples {
        let r = sample_radius(&mut rng, kw, 10.0 * kw);
        let th = rng.gen_range(0.0..2.0 * PI);
        let xi = [r * th.cos(), r * th.sin()];
        let s = dtn_symbol(xi, params);
        let neg_i_m = s.m.map(|row| row.map(|v| -C64::i() * v));
        let e = min_eig_hermitian_part(&neg_i_m);
        report.min_eig_outer = report.min_eig_outer.min(e);
        if e <= -LEMMA_SLACK * s.max_entry() {
            flag(&mut report, "re(-iM) positive definite", xi, e, 0.0);
        }
    }

    for _ in 0..n_samples {
        let r = kw * rng.gen::<f64>().sqrt();
        let th = rng.gen_range(0.0..2.0 * PI);
        let xi = [r * th.cos(), r * th.sin()];
        let s = dtn_symbol(xi, params);
        let ratio = s.max_entry() / (consts.c_k * w);
        report.max_ratio_inner = report.max_ratio_inner.max(ratio);
        if ratio > 1.0 + LEMMA_SLACK {
            flag(&mut report, "max|M_ij| <= C_K omega", xi, ratio, 1.0);
        }

        let rho = s.rho.norm();
        let (lo, hi) = if r <= kp {
            (kp * kp, kp * ks)
        } else if r <= ks {
            (kp * kp, ks * ks)
        } else {
            (consts.small_c_k * w * w, ks * ks)
        };
        report.rho_band_checks += 1;
        if rho < lo * (1.0 - LEMMA_SLACK) || rho > hi * (1.0 + LEMMA_SLACK) {
            flag(&mut report, "rho band", xi, rho, if rho < lo { lo } else { hi });
        }

        let (b, g) = branch_pair(xi, params);
        let gb = (g - b).norm();
        let cap = (ks * ks - kp * kp).sqrt();
        report.gamma_beta_checks += 1;
        let inside = r > kp && r <= ks;
        if (inside && (gb - cap).abs() > LEMMA_SLACK * cap) || (!inside && gb > cap * (1.0 + LEMMA_SLACK)) {
            flag(&mut report, "|gamma - beta|", xi, gb, cap);
        }
    }
    Ok(report)
}
