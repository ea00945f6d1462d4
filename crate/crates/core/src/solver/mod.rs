//! Discretization of the strip problem: Fourier modes in `x′`, linear
//! elements in `x3` on the flat reference strip, and the DtN condition on
//! the top plane. Also hosts the PDE-level diagnostics.

mod diagnostics;
mod field;
mod mesh;
mod norms;
mod oracle;
mod pointwise;
mod strip;
mod system;

pub use diagnostics::{
    coercivity_probe, energy_balance, energy_balance_residual, rellich_residual, rellich_terms, CoercivityReport,
    EnergyBalance, RellichReport, ENERGY_EPS,
};
pub use field::DiscreteField;
pub use mesh::{gauss_legendre, QuadPoint, StripMesh};
pub use norms::{
    norm_parts, poincare_check, source_norms, source_norms_reference, vh_norm, vh_norm_physical, NormParts,
    PoincareCheck,
};
pub use oracle::{flat_mode_oracle, ModeSolution};
pub use strip::MappedStrip;
pub use system::{assemble_system, solve_field, LinearSystem, SolveStats, SOLVE_TOL};

pub(crate) use oracle::lagrange4;
