use serde::{Deserialize, Serialize};

use crate::geometry::{transform_row, CutoffFn, SurfaceProfile};
use crate::{Error, Result};

/// The sampled strip as seen from the flat reference strip: a flat reference
/// surface `f0`, the actual surface `f` and the cutoff of the transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappedStrip {
    f0: SurfaceProfile,
    f: SurfaceProfile,
    cutoff: CutoffFn,
}

impl MappedStrip {
    /// The reference surface must be flat: it becomes the bottom of the mesh.
    pub fn new(f0: SurfaceProfile, f: SurfaceProfile, cutoff: CutoffFn) -> Result<Self> {
        if !f0.is_flat() {
            return Err(Error::Unsupported("the reference surface f0 must be flat".into()));
        }
        if f0.cell() != f.cell() {
            return Err(Error::Constraint("f0 and f must share the periodization cell".into()));
        }
        Ok(Self { f0, f, cutoff })
    }

    /// The untransformed strip above a flat surface.
    pub fn flat(f0: SurfaceProfile, h: f64) -> Result<Self> {
        let gamma = h - f0.spec().offset;
        let cutoff = CutoffFn::boundary_fitted(gamma)?;
        Self::new(f0.clone(), f0, cutoff)
    }

    pub fn f0(&self) -> &SurfaceProfile {
        &self.f0
    }

    pub fn surface(&self) -> &SurfaceProfile {
        &self.f
    }

    pub fn cutoff(&self) -> &CutoffFn {
        &self.cutoff
    }

    /// Height of the flat reference surface.
    pub fn level(&self) -> f64 {
        self.f0.spec().offset
    }

    /// True when the transform does not depend on `x′`, so Fourier modes
    /// decouple.
    pub fn is_uncoupled(&self) -> bool {
        self.f.is_flat()
    }

    /// Jacobian row `(J1, J2, J3)` and image height at `(x′, z)`.
    pub fn row_and_height(&self, x: [f64; 2], z: f64) -> Result<([f64; 3], f64)> {
        let base = self.level();
        let d = self.f.value(x) - base;
        let t = z - base;
        let row = transform_row(&self.cutoff, t, d, [0.0, 0.0], self.f.gradient(x));
        if row[2].abs() >= 1.0 {
            return Err(Error::SingularTransform(x[0], x[1], z, row[2].abs()));
        }
        Ok((row, z + self.cutoff.value(t) * d))
    }
}
