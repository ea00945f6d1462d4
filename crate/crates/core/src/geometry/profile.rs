use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::params::StripGeometry;
use crate::{Error, Result};

/// Safety factor applied to the grid estimate of `sup |∇f|` when a strict
/// Lipschitz bound is needed.
pub const LIPSCHITZ_SAFETY: f64 = 1.05;

/// One real trigonometric term `a cos(ξ·x′) + b sin(ξ·x′)` with
/// `ξ = 2π (j1/Λ1, j2/Λ2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierTerm {
    pub j: [i64; 2],
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

/// Coefficients of a band-limited surface `f(x′) = offset + Σ terms`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub offset: f64,
    #[serde(default)]
    pub terms: Vec<FourierTerm>,
}

impl ProfileSpec {
    pub fn flat(level: f64) -> Self {
        Self { offset: level, terms: Vec::new() }
    }

    /// Spec with every term amplitude multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let terms = self.terms.iter().map(|t| FourierTerm { j: t.j, cos: t.cos * s, sin: t.sin * s }).collect();
        Self { offset: self.offset, terms }
    }

    pub fn is_flat(&self) -> bool {
        self.terms.iter().all(|t| t.cos == 0.0 && t.sin == 0.0)
    }

    fn max_index(&self) -> [u64; 2] {
        let mut out = [0, 0];
        for t in &self.terms {
            out[0] = out[0].max(t.j[0].unsigned_abs());
            out[1] = out[1].max(t.j[1].unsigned_abs());
        }
        out
    }
}

/// A periodized surface graph with its extrema and Lipschitz estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceProfile {
    spec: ProfileSpec,
    cell: [f64; 2],
    // (ξ1, ξ2, a, b) per term
    waves: Vec<[f64; 4]>,
    lipschitz: f64,
    f_min: f64,
    f_max: f64,
    eval_dims: [usize; 2],
}

impl SurfaceProfile {
    /// Build the profile and scan it on an evaluation grid of `eval_dims`
    /// points, without any slab check.
    pub fn scan(spec: &ProfileSpec, cell: [f64; 2], eval_dims: [usize; 2]) -> Self {
        let waves = spec
            .terms
            .iter()
            .map(|t| [2.0 * PI * t.j[0] as f64 / cell[0], 2.0 * PI * t.j[1] as f64 / cell[1], t.cos, t.sin])
            .collect();
        let mut p =
            Self { spec: spec.clone(), cell, waves, lipschitz: 0.0, f_min: spec.offset, f_max: spec.offset, eval_dims };
        if !spec.is_flat() {
            let (mut lo, mut hi, mut lip) = (f64::INFINITY, f64::NEG_INFINITY, 0.0_f64);
            for_each_point(eval_dims, cell, |x| {
                let v = p.value(x);
                lo = lo.min(v);
                hi = hi.max(v);
                let g = p.gradient(x);
                lip = lip.max(g[0].hypot(g[1]));
            });
            p.f_min = lo;
            p.f_max = hi;
            p.lipschitz = lip;
        }
        p
    }

    pub fn flat(level: f64, cell: [f64; 2]) -> Self {
        Self::scan(&ProfileSpec::flat(level), cell, [1, 1])
    }

    pub fn spec(&self) -> &ProfileSpec {
        &self.spec
    }

    pub fn cell(&self) -> [f64; 2] {
        self.cell
    }

    pub fn is_flat(&self) -> bool {
        self.waves.is_empty() || self.spec.is_flat()
    }

    pub fn value(&self, x: [f64; 2]) -> f64 {
        let mut v = self.spec.offset;
        for w in &self.waves {
            let ph = w[0] * x[0] + w[1] * x[1];
            v += w[2] * ph.cos() + w[3] * ph.sin();
        }
        v
    }

    pub fn gradient(&self, x: [f64; 2]) -> [f64; 2] {
        let mut g = [0.0, 0.0];
        for w in &self.waves {
            let ph = w[0] * x[0] + w[1] * x[1];
            let d = -w[2] * ph.sin() + w[3] * ph.cos();
            g[0] += w[0] * d;
            g[1] += w[1] * d;
        }
        g
    }

    /// Grid estimate of `sup |∇f|`.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// Grid estimate inflated by [`LIPSCHITZ_SAFETY`], for use in bounds.
    pub fn lipschitz_bound(&self) -> f64 {
        self.lipschitz * LIPSCHITZ_SAFETY
    }

    pub fn f_min(&self) -> f64 {
        self.f_min
    }

    pub fn f_max(&self) -> f64 {
        self.f_max
    }

    pub fn eval_dims(&self) -> [usize; 2] {
        self.eval_dims
    }

    /// `sup |f − g| + sup |∇f − ∇g|` over this profile's evaluation grid.
    pub fn distance_1inf(&self, other: &SurfaceProfile) -> f64 {
        let (mut d0, mut d1) = (0.0_f64, 0.0_f64);
        for_each_point(self.eval_dims, self.cell, |x| {
            d0 = d0.max((self.value(x) - other.value(x)).abs());
            let (a, b) = (self.gradient(x), other.gradient(x));
            d1 = d1.max((a[0] - b[0]).hypot(a[1] - b[1]));
        });
        d0 + d1
    }

    /// Samples `(x1, x2, f)` on a uniform grid, for export.
    pub fn grid_samples(&self, dims: [usize; 2]) -> Vec<[f64; 3]> {
        let mut out = Vec::with_capacity(dims[0] * dims[1]);
        for_each_point(dims, self.cell, |x| out.push([x[0], x[1], self.value(x)]));
        out
    }

    fn check_slab(&self, geom: &StripGeometry) -> Result<()> {
        let mut worst: Option<(String, [f64; 2], f64)> = None;
        for_each_point(self.eval_dims, self.cell, |x| {
            if worst.is_some() {
                return;
            }
            let v = self.value(x);
            if v <= geom.m {
                worst = Some((format!("f > m = {}", geom.m), x, v));
            } else if v >= geom.m_sup {
                worst = Some((format!("f < M_sup = {}", geom.m_sup), x, v));
            }
        });
        match worst {
            None => Ok(()),
            Some((bound, x, value)) => Err(Error::SlabViolation { bound, x1: x[0], x2: x[1], value }),
        }
    }
}

fn for_each_point(dims: [usize; 2], cell: [f64; 2], mut f: impl FnMut([f64; 2])) {
    for p1 in 0..dims[0] {
        for p2 in 0..dims[1] {
            f([p1 as f64 * cell[0] / dims[0] as f64, p2 as f64 * cell[1] / dims[1] as f64]);
        }
    }
}

/// Evaluation grid used for slab checks and Lipschitz estimates: at least
/// eight times the solver grid and at least 32 points per shortest wave.
pub fn eval_dims_for(spec: &ProfileSpec, solver_dims: [usize; 2]) -> [usize; 2] {
    let jm = spec.max_index();
    [0, 1].map(|i| (8 * solver_dims[i]).max(32 * jm[i] as usize + 1).max(8))
}

/// Build a surface from its coefficients, verify `m < f < M_sup` on an
/// evaluation grid, and record `L`.
pub fn make_profile(spec: &ProfileSpec, geom: &StripGeometry, solver_dims: [usize; 2]) -> Result<SurfaceProfile> {
    if !spec.offset.is_finite() || spec.terms.iter().any(|t| !(t.cos.is_finite() && t.sin.is_finite())) {
        return Err(Error::Constraint("surface coefficients must be finite".into()));
    }
    let p = SurfaceProfile::scan(spec, geom.cell, eval_dims_for(spec, solver_dims));
    p.check_slab(geom)?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom() -> StripGeometry {
        StripGeometry::new(0.0, 1.0, 2.0, [2.0, 1.0]).unwrap()
    }

    #[test]
    fn flat_profile_has_zero_lipschitz() {
        let p = make_profile(&ProfileSpec::flat(0.5), &geom(), [5, 5]).unwrap();
        assert_eq!(p.lipschitz(), 0.0);
        assert_eq!(p.f_min(), 0.5);
    }

    #[test]
    fn cosine_lipschitz_matches_analytic() {
        let a = 0.1;
        let spec = ProfileSpec { offset: 0.5, terms: vec![FourierTerm { j: [1, 0], cos: a, sin: 0.0 }] };
        let p = make_profile(&spec, &geom(), [5, 5]).unwrap();
        let exact = 2.0 * PI * a / 2.0;
        assert!((p.lipschitz() - exact).abs() <= 0.01 * exact, "{} vs {exact}", p.lipschitz());
        assert!(p.lipschitz_bound() >= exact);
    }

    #[test]
    fn leaving_the_slab_is_rejected() {
        let spec = ProfileSpec { offset: 0.5, terms: vec![FourierTerm { j: [0, 1], cos: 0.0, sin: 0.6 }] };
        match make_profile(&spec, &geom(), [5, 5]) {
            Err(Error::SlabViolation { value, .. }) => assert!(value >= 1.0 || value <= 0.0),
            other => panic!("expected slab violation, got {other:?}"),
        }
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let spec = ProfileSpec {
            offset: 0.5,
            terms: vec![
                FourierTerm { j: [1, 2], cos: 0.05, sin: -0.03 },
                FourierTerm { j: [-2, 1], cos: 0.02, sin: 0.01 },
            ],
        };
        let p = SurfaceProfile::scan(&spec, [2.0, 1.0], [16, 16]);
        let x = [0.3, 0.7];
        let e = 1e-6;
        let g = p.gradient(x);
        let d1 = (p.value([x[0] + e, x[1]]) - p.value([x[0] - e, x[1]])) / (2.0 * e);
        let d2 = (p.value([x[0], x[1] + e]) - p.value([x[0], x[1] - e])) / (2.0 * e);
        assert!((g[0] - d1).abs() < 1e-8 && (g[1] - d2).abs() < 1e-8);
    }
}
