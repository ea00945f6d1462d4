use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violates a stated constraint (e.g. `mu must be positive`).
    #[error("constraint violated: {0}")]
    Constraint(String),

    /// The surface leaves the slab `m < f < M`.
    #[error("surface leaves the slab ({bound}) at x' = ({x1:.6}, {x2:.6}): f = {value:.6}")]
    SlabViolation { bound: String, x1: f64, x2: f64, value: f64 },

    /// The flattening transform is not invertible at some point.
    #[error("singular transform at y = ({0:.6}, {1:.6}, {2:.6}): |J3| = {3:.6} >= 1")]
    SingularTransform(f64, f64, f64, f64),

    /// A per-mode block could not be factored.
    #[error("singular block for mode ({0}, {1})")]
    SingularBlock(i64, i64),

    /// Iterative solve stopped before reaching the requested tolerance.
    #[error("solver did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    /// A diagnostic detected an invariant violation.
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// Configuration that a diagnostic or operation does not support.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// An internal numerical failure that should not occur for valid inputs.
    #[error("internal numerical error: {0}")]
    Internal(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
