use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// One horizontal harmonic of the source: polarization `p` carried by
/// `e^{i(ξ_j·x′ + phase)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceMode {
    pub j: [i64; 2],
    pub polarization: [f64; 3],
    #[serde(default)]
    pub phase: f64,
}

/// Body force `g(x) = A w(x3) Σ_k p_k e^{i(ξ_k·x′ + φ_k)}`.
///
/// The vertical profile `w` is a Gaussian centred at `center` multiplied by
/// the window `sin²(π s)` on `support = [lo, hi]`, so `w` and `w′` vanish at
/// both ends and `g` is `C¹` with compact vertical support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
    pub support: [f64; 2],
    pub modes: Vec<SourceMode>,
}

impl SourceSpec {
    /// Single harmonic with unit amplitude.
    pub fn single(j: [i64; 2], polarization: [f64; 3], center: f64, width: f64, support: [f64; 2]) -> Self {
        Self { amplitude: 1.0, center, width, support, modes: vec![SourceMode { j, polarization, phase: 0.0 }] }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { amplitude: self.amplitude * s, ..self.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude == 0.0 || self.modes.iter().all(|m| m.polarization == [0.0; 3])
    }

    /// Check the window lies strictly between the surface top and `h`.
    pub fn validate(&self, surface_sup: f64, h: f64) -> Result<()> {
        let [lo, hi] = self.support;
        if !(self.width > 0.0) {
            return Err(Error::Constraint(format!("source width must be positive, got {}", self.width)));
        }
        if !(lo < hi) {
            return Err(Error::Constraint(format!("source support must satisfy lo < hi, got [{lo}, {hi}]")));
        }
        if !(lo > surface_sup && hi < h) {
            return Err(Error::Constraint(format!(
                "source support [{lo}, {hi}] must lie strictly inside ({surface_sup}, {h})"
            )));
        }
        Ok(())
    }

    /// Vertical profile `w(x3)` and its derivative.
    pub fn vertical(&self, z: f64) -> (f64, f64) {
        let [lo, hi] = self.support;
        if z <= lo || z >= hi {
            return (0.0, 0.0);
        }
        let len = hi - lo;
        let s = (z - lo) / len;
        let (sn, cs) = (PI * s).sin_cos();
        let win = sn * sn;
        let dwin = 2.0 * sn * cs * PI / len;
        let r = (z - self.center) / self.width;
        let gauss = (-0.5 * r * r).exp();
        let dgauss = -r / self.width * gauss;
        (gauss * win, dgauss * win + gauss * dwin)
    }

    fn xi(j: [i64; 2], cell: [f64; 2]) -> [f64; 2] {
        [2.0 * PI * j[0] as f64 / cell[0], 2.0 * PI * j[1] as f64 / cell[1]]
    }

    pub fn value(&self, x: [f64; 3], cell: [f64; 2]) -> [C64; 3] {
        let (w, _) = self.vertical(x[2]);
        let mut out = [C64::new(0.0, 0.0); 3];
        if w == 0.0 {
            return out;
        }
        for m in &self.modes {
            let xi = Self::xi(m.j, cell);
            let e = C64::from_polar(self.amplitude * w, xi[0] * x[0] + xi[1] * x[1] + m.phase);
            for c in 0..3 {
                out[c] += e * m.polarization[c];
            }
        }
        out
    }

    /// `grad[i][j] = ∂_j g_i`.
    pub fn gradient(&self, x: [f64; 3], cell: [f64; 2]) -> [[C64; 3]; 3] {
        let (w, dw) = self.vertical(x[2]);
        let mut out = [[C64::new(0.0, 0.0); 3]; 3];
        if w == 0.0 && dw == 0.0 {
            return out;
        }
        for m in &self.modes {
            let xi = Self::xi(m.j, cell);
            let e = C64::from_polar(self.amplitude, xi[0] * x[0] + xi[1] * x[1] + m.phase);
            let d = [e * C64::new(0.0, xi[0] * w), e * C64::new(0.0, xi[1] * w), e * dw];
            for i in 0..3 {
                for j in 0..3 {
                    out[i][j] += d[j] * m.polarization[i];
                }
            }
        }
        out
    }

    /// Coefficient of lattice mode `j` as a function of height: the source
    /// restricted to one harmonic, `g = ĝ_j(x3) e^{iξ_j·x′}`.
    pub fn mode_profile(&self, j: [i64; 2], z: f64) -> [C64; 3] {
        let (w, _) = self.vertical(z);
        let mut out = [C64::new(0.0, 0.0); 3];
        for m in self.modes.iter().filter(|m| m.j == j) {
            let e = C64::from_polar(self.amplitude * w, m.phase);
            for c in 0..3 {
                out[c] += e * m.polarization[c];
            }
        }
        out
    }
}
