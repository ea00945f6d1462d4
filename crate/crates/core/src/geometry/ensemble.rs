use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{make_profile, FourierTerm, SourceSpec, SurfaceProfile};
use crate::params::StripGeometry;
use crate::{Error, Result};

/// Draws per sample before giving up on the admissible class.
pub const MAX_RETRIES: usize = 100;

/// One random harmonic: amplitude uniform on `[0, max_amp]`, phase uniform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawTerm {
    pub j: [i64; 2],
    pub max_amp: f64,
}

/// Law of the surface perturbation `f(η) − f0` and of the source jitter.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleLaw {
    pub terms: Vec<LawTerm>,
    /// Each polarization component is perturbed by a uniform draw on
    /// `[−jitter, jitter]`.
    #[serde(default)]
    pub source_jitter: f64,
}

impl EnsembleLaw {
    /// Analytic bound on `‖f − f0‖_{1,∞}` over the law's support:
    /// `Σ r_max (1 + |ξ_j|)`.
    pub fn worst_case(&self, cell: [f64; 2]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let xi = [2.0 * PI * t.j[0] as f64 / cell[0], 2.0 * PI * t.j[1] as f64 / cell[1]];
                t.max_amp.abs() * (1.0 + xi[0].hypot(xi[1]))
            })
            .sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        let terms = self.terms.iter().map(|t| LawTerm { j: t.j, max_amp: t.max_amp * s }).collect();
        Self { terms, source_jitter: self.source_jitter }
    }
}

/// One draw of the random surface and source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomSample {
    pub sample_id: usize,
    /// Stream tag of the generator that produced this sample.
    pub stream: u64,
    pub surface: SurfaceProfile,
    pub source: SourceSpec,
    /// Draws discarded before this one was accepted.
    pub rejections: usize,
}

/// The generator for sample `id`: the seed selects the key, the sample id
/// selects an independent stream.
pub fn sample_rng(seed: u64, id: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id as u64);
    rng
}

/// Draw `n` samples with `‖f(η) − f0‖_{1,∞} ≤ M0` and `m < f(η) < M_sup`.
///
/// Each sample uses its own stream, so the ensemble does not depend on how
/// samples are scheduled across threads.
#[allow(clippy::too_many_arguments)]
pub fn sample_ensemble(
    seed: u64,
    n: usize,
    m0: f64,
    law: &EnsembleLaw,
    geom: &StripGeometry,
    f0: &SurfaceProfile,
    source: &SourceSpec,
    solver_dims: [usize; 2],
) -> Result<Vec<RandomSample>> {
    if n == 0 {
        return Err(Error::Constraint("ensemble size must be positive".into()));
    }
    if !(m0 >= 0.0) {
        return Err(Error::Constraint(format!("M0 must be nonnegative, got {m0}")));
    }
    source.validate(geom.m_sup, geom.h)?;
    (0..n).into_par_iter().map(|id| draw_one(seed, id, m0, law, geom, f0, source, solver_dims)).collect()
}

#[allow(clippy::too_many_arguments)]
fn draw_one(
    seed: u64,
    id: usize,
    m0: f64,
    law: &EnsembleLaw,
    geom: &StripGeometry,
    f0: &SurfaceProfile,
    source: &SourceSpec,
    solver_dims: [usize; 2],
) -> Result<RandomSample> {
    let mut rng = sample_rng(seed, id);
    let mut last = String::new();
    for attempt in 0..=MAX_RETRIES {
        let mut spec = f0.spec().clone();
        for t in &law.terms {
            let r = t.max_amp.abs() * rng.gen::<f64>();
            let phase = 2.0 * PI * rng.gen::<f64>();
            spec.terms.push(FourierTerm { j: t.j, cos: r * phase.cos(), sin: r * phase.sin() });
        }
        let mut src = source.clone();
        if law.source_jitter > 0.0 {
            for m in &mut src.modes {
                for p in &mut m.polarization {
                    *p += law.source_jitter * (2.0 * rng.gen::<f64>() - 1.0);
                }
            }
        }
        let surface = match make_profile(&spec, geom, solver_dims) {
            Ok(s) => s,
            Err(e) => {
                last = e.to_string();
                continue;
            }
        };
        let dist = surface.distance_1inf(f0);
        if dist > m0 {
            last = format!("||f - f0||_1,inf = {dist} exceeds M0 = {m0}");
            continue;
        }
        return Ok(RandomSample { sample_id: id, stream: id as u64, surface, source: src, rejections: attempt });
    }
    Err(Error::Constraint(format!("sample {id} rejected {} times; last reason: {last}", MAX_RETRIES + 1)))
}
