//! Surface profiles, the flattening transform between a reference strip and
//! a sampled strip, source terms, and random ensembles of both.

mod cutoff;
mod ensemble;
mod profile;
mod source;
mod transform;

pub use cutoff::CutoffFn;
pub use ensemble::{sample_ensemble, sample_rng, EnsembleLaw, LawTerm, RandomSample, MAX_RETRIES};
pub use profile::{eval_dims_for, make_profile, FourierTerm, ProfileSpec, SurfaceProfile, LIPSCHITZ_SAFETY};
pub use source::{SourceMode, SourceSpec};
pub use transform::{inverse_transform, transform_map, transform_row, TransformData};
