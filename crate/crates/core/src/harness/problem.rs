use crate::config::RunConfig;
use crate::geometry::{make_profile, CutoffFn, RandomSample, SourceSpec, SurfaceProfile};
use crate::params::{ElasticParams, StripGeometry};
use crate::solver::{MappedStrip, StripMesh};
use crate::Result;

/// Everything a single solve needs, built from a validated configuration.
#[derive(Debug, Clone)]
pub struct Problem {
    pub params: ElasticParams,
    pub geom: StripGeometry,
    pub f0: SurfaceProfile,
    pub surface: SurfaceProfile,
    pub cutoff: CutoffFn,
    pub source: SourceSpec,
    pub mesh: StripMesh,
}

impl Problem {
    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        let params = cfg.params()?;
        let geom = cfg.strip_geometry()?;
        let grid = cfg.grid();
        let dims = grid.dims();
        let f0 = make_profile(&cfg.reference_spec(), &geom, dims)?;
        let surface = make_profile(&cfg.surface_spec(), &geom, dims)?;
        let d = &cfg.discretization;
        let mesh = StripMesh::uniform(grid, cfg.surface.f0, geom.h, d.nz, d.quad_order)?;
        Ok(Self { params, geom, f0, surface, cutoff: cfg.cutoff()?, source: cfg.source.clone(), mesh })
    }

    /// The strip seen through the transform with the configured cutoff.
    pub fn strip(&self) -> Result<MappedStrip> {
        MappedStrip::new(self.f0.clone(), self.surface.clone(), self.cutoff)
    }

    /// The same problem with a sampled surface and source.
    pub fn with_sample(&self, sample: &RandomSample) -> Self {
        Self { surface: sample.surface.clone(), source: sample.source.clone(), ..self.clone() }
    }

    /// The deterministic surface and source of the configuration as a sample.
    pub fn as_sample(&self) -> RandomSample {
        RandomSample {
            sample_id: 0,
            stream: 0,
            surface: self.surface.clone(),
            source: self.source.clone(),
            rejections: 0,
        }
    }
}
