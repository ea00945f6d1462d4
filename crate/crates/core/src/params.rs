//! Material parameters, vertical wavenumbers and the closed-form constants
//! that appear in the stability and a priori estimates.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Lamé constants and frequency of the elastic medium above the surface.
///
/// The density is normalized to one, so `k_p = ω/√(λ+2μ)` and `k_s = ω/√μ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElasticParams {
    lambda: f64,
    mu: f64,
    omega: f64,
    kp: f64,
    ks: f64,
}

impl ElasticParams {
    /// Validate raw inputs and derive the wavenumbers.
    pub fn new(lambda: f64, mu: f64, omega: f64) -> Result<Self> {
        if !(lambda.is_finite() && mu.is_finite() && omega.is_finite()) {
            return Err(Error::Constraint("lambda, mu and omega must be finite".into()));
        }
        if mu <= 0.0 {
            return Err(Error::Constraint("mu must be positive".into()));
        }
        if lambda + 2.0 * mu / 3.0 <= 0.0 {
            return Err(Error::Constraint("lambda + 2 mu / 3 must be positive".into()));
        }
        if omega <= 0.0 {
            return Err(Error::Constraint("omega must be positive".into()));
        }
        Ok(Self { lambda, mu, omega, kp: omega / (lambda + 2.0 * mu).sqrt(), ks: omega / mu.sqrt() })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Compressional wavenumber.
    pub fn kp(&self) -> f64 {
        self.kp
    }

    /// Shear wavenumber.
    pub fn ks(&self) -> f64 {
        self.ks
    }

    /// Same medium at another frequency.
    pub fn with_omega(&self, omega: f64) -> Result<Self> {
        Self::new(self.lambda, self.mu, omega)
    }
}

/// Shorthand for [`ElasticParams::new`].
pub fn validate_params(lambda: f64, mu: f64, omega: f64) -> Result<ElasticParams> {
    ElasticParams::new(lambda, mu, omega)
}

/// `√(k² − |ξ|²)` on the upward branch: real and nonnegative below the
/// cutoff, `i√(|ξ|² − k²)` above it, zero exactly at `|ξ| = k`.
pub fn vertical_wavenumber(k: f64, xi: [f64; 2]) -> C64 {
    let d = k * k - (xi[0] * xi[0] + xi[1] * xi[1]);
    if d >= 0.0 {
        C64::new(d.sqrt(), 0.0)
    } else {
        C64::new(0.0, (-d).sqrt())
    }
}

/// Heights describing the truncated strip and the periodization cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripGeometry {
    /// Strict lower bound of the surface height.
    pub m: f64,
    /// Strict upper bound of the surface height.
    pub m_sup: f64,
    /// Height of the artificial boundary carrying the DtN condition.
    pub h: f64,
    /// Periodization lengths `(Λ1, Λ2)`.
    pub cell: [f64; 2],
}

impl StripGeometry {
    pub fn new(m: f64, m_sup: f64, h: f64, cell: [f64; 2]) -> Result<Self> {
        if !(m < m_sup) {
            return Err(Error::Constraint(format!("need m < M_sup (m = {m}, M_sup = {m_sup})")));
        }
        if !(m_sup < h) {
            return Err(Error::Constraint(format!("need M_sup < h (M_sup = {m_sup}, h = {h})")));
        }
        if !(cell[0] > 0.0 && cell[1] > 0.0) {
            return Err(Error::Constraint("cell lengths must be positive".into()));
        }
        Ok(Self { m, m_sup, h, cell })
    }

    /// Auxiliary height `H = h + 1` used by the a priori estimates.
    pub fn aux_height(&self) -> f64 {
        self.h + 1.0
    }

    /// Gap between the truncation height and the top of the reference surface.
    pub fn gap(&self, f0_sup: f64) -> f64 {
        self.h - f0_sup
    }

    /// Check `(M − m)/γ < 1` for a reference surface with supremum `f0_sup`.
    pub fn check_gap(&self, f0_sup: f64) -> Result<()> {
        let gamma = self.gap(f0_sup);
        if gamma <= 0.0 || (self.m_sup - self.m) / gamma >= 1.0 {
            return Err(Error::Constraint(format!(
                "need (M_sup - m)/gamma < 1, got ({} - {})/{} ",
                self.m_sup, self.m, gamma
            )));
        }
        Ok(())
    }

    pub fn cell_area(&self) -> f64 {
        self.cell[0] * self.cell[1]
    }
}

/// Constants controlling the DtN symbol: the threshold `K`, the bound
/// `‖M(ξ)‖ ≤ C_K ω` below it, and the lower bound `|ρ| ≥ c_K ω²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityConstants {
    pub k: f64,
    pub c_k: f64,
    pub small_c_k: f64,
}

pub fn stability_constants(params: &ElasticParams) -> StabilityConstants {
    let (lambda, mu) = (params.lambda(), params.mu());
    let lp2m = lambda + 2.0 * mu;
    let k = lp2m / (mu * (lambda + mu).sqrt());
    let k2 = k * k;
    let c_lm = ((lambda + mu) / (mu * lp2m)).sqrt();
    let c_k = 2.0 * (lambda + 4.0 * mu) * k + (mu * lp2m * k2 + 2.0 * lp2m / mu) * c_lm;
    let small_c_k = k2 - ((k2 - 1.0 / mu) * (k2 - 1.0 / lp2m)).sqrt();
    StabilityConstants { k, c_k, small_c_k }
}

/// Constants `C1..C6` of the frequency-explicit a priori bound and the total
/// factor `(h − m + 2)(C4 + C5² + C6)`.
///
/// The generic constant `C` is not quantified by the theory; it is carried as
/// `generic_c` and every bound comparison is reported as a ratio. A sharper
/// local form `C1 = 4μ⁻¹(1+L²)^{1/2}(ω(h−m)/√μ + 1)` exists but is not used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
    /// `(h − m + 2)(C4 + C5² + C6)`.
    pub total_bound: f64,
    /// `(h − m + 2)(C4 + C5 + C6)`, the unsquared variant used by the
    /// per-sample and stochastic bounds.
    pub total_bound_linear: f64,
    pub generic_c: f64,
    pub measured_ratio: Option<f64>,
}

pub fn bound_constants(
    params: &ElasticParams,
    geom: &StripGeometry,
    lipschitz: f64,
    generic_c: f64,
) -> Result<BoundReport> {
    if !(lipschitz >= 0.0) {
        return Err(Error::Constraint("Lipschitz constant must be nonnegative".into()));
    }
    if !(generic_c > 0.0) {
        return Err(Error::Constraint("generic constant C must be positive".into()));
    }
    let c = generic_c;
    let w = params.omega();
    let (h, m) = (geom.h, geom.m);
    let span = h + 1.0 - m;
    let l2 = 1.0 + lipschitz * lipschitz;

    let c1 = c * w.powi(3) * l2.sqrt() * (h - m + 1.0);
    let c2 = c * l2.powf(0.25) * span.sqrt() * (1.0 + w * span);
    let c3 = c * span * (1.0 + w * span).powi(2) / w;
    let c4 = c * span * w;
    let c5 = c * (1.0 + 1.0 / w).sqrt() * c3;
    let c6 = c * (1.0 / w + 1.0) * c1 * c2 * c2;
    let lead = h - m + 2.0;
    Ok(BoundReport {
        c1,
        c2,
        c3,
        c4,
        c5,
        c6,
        total_bound: lead * (c4 + c5 * c5 + c6),
        total_bound_linear: lead * (c4 + c5 + c6),
        generic_c,
        measured_ratio: None,
    })
}
