//! Frequency-domain solver for time-harmonic elastic waves scattered by a
//! rigid rough surface in three dimensions.
//!
//! The field lives in a strip between the surface and an artificial plane
//! `x3 = h`, where a Dirichlet-to-Neumann map closes the problem exactly.
//! Horizontal directions are periodized and treated spectrally; the vertical
//! direction uses linear finite elements on a flattened reference strip, so a
//! rough surface only enters through variable coefficients.
//!
//! Module map:
//! - [`params`]: Lamé parameters, wavenumbers and closed-form constants.
//! - [`spectral`]: the angular-spectrum machinery and the DtN symbol.
//! - [`geometry`]: surface profiles, the flattening transform, sources and ensembles.
//! - [`solver`]: discretization, assembly, solves and PDE-level diagnostics.
//! - [`harness`]: end-to-end runs, sweeps, Monte Carlo and reports.
//! - [`config`]: the run configuration file.

// Negated comparisons reject NaN on purpose; index loops mirror the maths.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod linalg;
pub mod params;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
