//! Angular-spectrum representation above the artificial boundary: mode
//! decomposition, upward extension, the DtN symbol and its application.

mod grid;
mod lemma;
mod symbol;
mod trace;

pub use grid::{point_on, Fft2, SpectralGrid, SpectralTransform};
pub use lemma::{verify_symbol_lemma, SymbolLemmaReport, SymbolViolation, LEMMA_SLACK};
pub use symbol::{
    branch_pair, decomposition_matrices, dtn_symbol, mode_traction, propagator_matrices, rho, Decomposition, DtnSymbol,
    ModeAmplitude,
};
pub use trace::{
    apply_dtn, decompose_trace, evaluate_upward, extend_field, flux_both_ways, radiated_power_mode, BoundaryTrace,
    ModeAmplitudes,
};
