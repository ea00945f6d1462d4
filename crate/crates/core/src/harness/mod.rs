//! End-to-end experiments: deterministic runs with the a priori bound,
//! parameter sweeps, Monte Carlo over random surfaces, and the cross-check
//! of the flattening transform against a boundary-fitted solve.

mod mc;
pub mod output;
mod problem;
mod pushforward;
mod run;

pub use mc::{monte_carlo, solve_sample, McReport, McSample};
pub use problem::Problem;
pub use pushforward::{pull_back, pushforward_check, PushforwardReport};
pub use run::{
    deterministic_run, deterministic_run_with_field, parameter_sweep, solve_and_check, sweep_config, Diagnostics,
    RunReport, SweepRow, SweepTable, ENERGY_TOL, POINCARE_SLACK, POWER_FLOOR,
};
