//! The run configuration: one TOML file with nested sections. Unknown keys
//! are rejected and every physical invariant is re-checked on load.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::geometry::{CutoffFn, EnsembleLaw, FourierTerm, ProfileSpec, SourceSpec};
use crate::params::{ElasticParams, StripGeometry};
use crate::spectral::SpectralGrid;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsConfig {
    pub lambda: f64,
    pub mu: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub m: f64,
    pub m_sup: f64,
    pub h: f64,
    pub cell: [f64; 2],
}

/// Flat reference level `f0`, a deterministic perturbation `f − f0`, the
/// cutoff offset `δ` and the class radius `M0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    pub f0: f64,
    #[serde(default)]
    pub terms: Vec<FourierTerm>,
    pub delta: f64,
    pub m0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscretizationConfig {
    /// Mode half-widths `(N1, N2)`: indices `|j_i| ≤ N_i`.
    pub half_widths: [usize; 2],
    pub nz: usize,
    #[serde(default = "default_quad")]
    pub quad_order: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_restart")]
    pub restart: usize,
}

fn default_quad() -> usize {
    3
}

fn default_tol() -> f64 {
    1e-11
}

fn default_restart() -> usize {
    80
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub n_samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
    #[serde(default = "default_generic_c")]
    pub generic_c: f64,
    /// ξ samples per region for the symbol lemma check.
    #[serde(default = "default_lemma_samples")]
    pub lemma_samples: usize,
}

fn default_samples() -> usize {
    64
}

fn default_generic_c() -> f64 {
    1.0
}

fn default_lemma_samples() -> usize {
    10_000
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Omega,
    H,
    LAmplitude,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub physics: PhysicsConfig,
    pub geometry: GeometryConfig,
    pub surface: SurfaceConfig,
    pub source: SourceSpec,
    #[serde(default)]
    pub ensemble: EnsembleLaw,
    pub discretization: DiscretizationConfig,
    pub run: RunSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path)?;
        Self::from_toml_str(&s)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn params(&self) -> Result<ElasticParams> {
        ElasticParams::new(self.physics.lambda, self.physics.mu, self.physics.omega)
    }

    pub fn strip_geometry(&self) -> Result<StripGeometry> {
        let g = &self.geometry;
        StripGeometry::new(g.m, g.m_sup, g.h, g.cell)
    }

    pub fn grid(&self) -> SpectralGrid {
        SpectralGrid::new(self.discretization.half_widths, self.geometry.cell)
    }

    /// Gap `γ = h − f0` between the reference level and the top.
    pub fn gamma(&self) -> f64 {
        self.geometry.h - self.surface.f0
    }

    pub fn cutoff(&self) -> Result<CutoffFn> {
        CutoffFn::new(self.surface.delta, self.gamma())
    }

    pub fn reference_spec(&self) -> ProfileSpec {
        ProfileSpec::flat(self.surface.f0)
    }

    /// The deterministic surface `f0 + Σ terms`.
    pub fn surface_spec(&self) -> ProfileSpec {
        ProfileSpec { offset: self.surface.f0, terms: self.surface.terms.clone() }
    }

    /// Check every invariant that can be checked without building profiles.
    pub fn validate(&self) -> Result<()> {
        self.params()?;
        let geom = self.strip_geometry()?;
        let s = &self.surface;
        if !(s.f0 > geom.m && s.f0 < geom.m_sup) {
            return Err(Error::Constraint(format!("reference level f0 = {} must lie in (m, M_sup)", s.f0)));
        }
        geom.check_gap(s.f0)?;
        let cutoff = self.cutoff()?;
        if !cutoff.meets_slope_bound() {
            return Err(Error::Constraint(format!(
                "cutoff offset delta = {} must lie in (0, gamma/2) with gamma = {}",
                s.delta,
                self.gamma()
            )));
        }
        if !(s.m0 >= 0.0) {
            return Err(Error::Constraint("m0 must be nonnegative".into()));
        }
        self.source.validate(geom.m_sup, geom.h)?;
        let d = &self.discretization;
        if d.nz < 2 {
            return Err(Error::Constraint("nz must be at least 2".into()));
        }
        if !(1..=5).contains(&d.quad_order) {
            return Err(Error::Constraint("quad_order must be in 1..=5".into()));
        }
        if !(d.tol > 0.0 && d.tol <= 1e-9) {
            return Err(Error::Constraint("tol must lie in (0, 1e-9]".into()));
        }
        if d.restart == 0 {
            return Err(Error::Constraint("restart must be positive".into()));
        }
        if !(self.run.generic_c > 0.0) {
            return Err(Error::Constraint("generic_c must be positive".into()));
        }
        if self.run.n_samples == 0 || self.run.lemma_samples == 0 {
            return Err(Error::Constraint("sample counts must be positive".into()));
        }
        if let Some(sw) = &self.sweep {
            if sw.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::Constraint("sweep values must be finite".into()));
            }
        }
        Ok(())
    }

    /// A small flat configuration used as a template and in tests.
    pub fn example() -> Self {
        toml::from_str(EXAMPLE).expect("embedded example parses")
    }
}

/// The template written by `rough-elastic init`-style tooling and used by
/// the test suite.
pub const EXAMPLE: &str = r#"
[physics]
lambda = 1.0
mu = 1.0
omega = 1.0

[geometry]
m = -0.25
m_sup = 0.25
h = 1.5
cell = [2.0, 2.0]

[surface]
f0 = 0.0
delta = 0.1875
m0 = 0.5
terms = []

[source]
amplitude = 1.0
center = 0.9
width = 0.2
support = [0.4, 1.4]
modes = [
  { j = [0, 0], polarization = [1.0, 0.0, 0.5] },
  { j = [1, 0], polarization = [0.0, 1.0, 0.3], phase = 0.2 },
]

[ensemble]
terms = [{ j = [1, 0], max_amp = 0.02 }, { j = [0, 1], max_amp = 0.02 }, { j = [1, 1], max_amp = 0.01 }]
source_jitter = 0.1

[discretization]
half_widths = [2, 2]
nz = 32
quad_order = 3

[run]
seed = 7
n_samples = 8
generic_c = 1.0
"#;
