//! Choosing the fishing-task rate.
//!
//! The true fishing share has no closed form, so the solver works on the
//! surrogate where the share is replaced by its closed-form upper bound.
//! That surrogate is concave in the rate and its optimum is within
//! `L * rho` of the true optimum, `rho` being the maximal bound gap. A
//! Monte Carlo grid search over the true objective serves as the
//! independent check.

mod golden;
mod reward;
mod solve;
mod sweep;
mod utility;

pub use golden::{golden_section_maximize, GoldenResult};
pub use reward::{reward, RewardModel};
pub use solve::{
    feasible_grid, feasible_interval, grid_maximize, grid_solve_op_mc, solve_op1, McGridSolution,
    OptimizationResult, LAMBDA_TOLERANCE,
};
pub use sweep::{sweep_deposit, SweepRow};
pub use utility::{utility, utility_at, utility_gradient, utility_terms, UtilityConfig, UtilityTerms};
