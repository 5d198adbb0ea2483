//! Arrival model, Poisson sampling, the fishing-share estimator and its
//! closed-form bounds.

mod bounds;
mod estimate;
mod poisson;

use serde::{Deserialize, Serialize};

pub use bounds::{
    alpha, asymptotic_series, bounds, inverse_mean_factor, lower_bound, max_gap, max_gap_on_grid,
    upper_bound, BoundPair, GapSearch, GAP_GRID_POINTS, SERIES_MAX_TERMS,
};
pub use estimate::{
    batch_rng, derive_seed, estimate_p, fishing_share, sample_slot_counts, MonteCarloEstimate,
    RunningStats, SlotSampler, BATCH_SIZE,
};
pub use poisson::{ln_factorial, Poisson};

use crate::error::{Error, Result};

/// Per-slot Poisson arrival rates for fishing (`lambda_x`) and regular
/// (`lambda_y`) tasks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrivalModel {
    pub lambda_x: f64,
    pub lambda_y: f64,
}

impl ArrivalModel {
    pub fn new(lambda_x: f64, lambda_y: f64) -> Result<Self> {
        let m = Self { lambda_x, lambda_y };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("lambda_x", self.lambda_x), ("lambda_y", self.lambda_y)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(name, "must be finite and >= 0"));
            }
        }
        Ok(())
    }

    pub fn bounds(&self) -> Result<BoundPair> {
        bounds(self.lambda_x, self.lambda_y)
    }
}
