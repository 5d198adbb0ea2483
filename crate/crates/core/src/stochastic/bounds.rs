//! Closed-form bracket for `p(lx, ly) = E[X / (X + Y + 1)]`,
//! `X ~ Pois(lx)`, `Y ~ Pois(ly)`.
//!
//! With `alpha = (lx / ly) (1 - e^-ly)`:
//!
//! ```text
//! ub = 1 - 1 / (1 + alpha)
//! lb = alpha - lx (1 + lx) / ly * sum_{j>=1} (j-1)! / ly^j
//! ```
//!
//! The series diverges for every `ly`, so it is summed as an asymptotic
//! expansion: stop at the smallest term. `lb` is floored at zero since
//! `p >= 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SERIES_MAX_TERMS: u32 = 50;
const SERIES_REL_CUTOFF: f64 = 1e-16;

pub const GAP_GRID_POINTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundPair {
    pub lower: f64,
    pub upper: f64,
}

impl BoundPair {
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, p: f64) -> bool {
        self.lower <= p && p <= self.upper
    }
}

/// `(1 - e^-ly) / ly`, with its limit 1 at `ly = 0`.
pub fn inverse_mean_factor(lambda_y: f64) -> f64 {
    if lambda_y == 0.0 {
        1.0
    } else {
        -(-lambda_y).exp_m1() / lambda_y
    }
}

pub fn alpha(lambda_x: f64, lambda_y: f64) -> f64 {
    lambda_x * inverse_mean_factor(lambda_y)
}

pub fn upper_bound(lambda_x: f64, lambda_y: f64) -> f64 {
    let a = alpha(lambda_x, lambda_y);
    a / (1.0 + a)
}

/// `sum_{j>=1} (j-1)! / ly^j`, truncated where the terms stop shrinking,
/// drop below `1e-16` of the running sum, or after 50 terms.
pub fn asymptotic_series(lambda_y: f64) -> Result<f64> {
    if !(lambda_y > 1.0 && lambda_y.is_finite()) {
        return Err(Error::LowerBoundDomain(lambda_y));
    }
    let mut term = 1.0 / lambda_y;
    let mut sum = term;
    for j in 2..=SERIES_MAX_TERMS {
        // (j-1)!/ly^j = (j-2)!/ly^(j-1) * (j-1)/ly
        let next = term * (j - 1) as f64 / lambda_y;
        if next >= term || next <= SERIES_REL_CUTOFF * sum {
            break;
        }
        sum += next;
        term = next;
    }
    Ok(sum)
}

pub fn lower_bound(lambda_x: f64, lambda_y: f64) -> Result<f64> {
    let series = asymptotic_series(lambda_y)?;
    let raw = alpha(lambda_x, lambda_y) - lambda_x * (1.0 + lambda_x) / lambda_y * series;
    Ok(raw.max(0.0))
}

pub fn bounds(lambda_x: f64, lambda_y: f64) -> Result<BoundPair> {
    Ok(BoundPair {
        lower: lower_bound(lambda_x, lambda_y)?,
        upper: upper_bound(lambda_x, lambda_y),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapSearch {
    pub rho: f64,
    /// Grid point where the gap peaks.
    pub at_lambda_x: f64,
}

/// Maximal `ub - lb` over `lambda_x` in `(0, lambda_x_max]` on a uniform grid
/// of `points` nodes `lambda_x_max * i / points`, `i = 1..=points`.
pub fn max_gap_on_grid(lambda_y: f64, lambda_x_max: f64, points: usize) -> Result<GapSearch> {
    if !(lambda_x_max > 0.0 && lambda_x_max.is_finite()) {
        return Err(Error::invalid("lambda_x_max", "must be finite and > 0"));
    }
    if points == 0 {
        return Err(Error::invalid("points", "grid needs at least one point"));
    }
    let series = asymptotic_series(lambda_y)?;
    let gap = |lx: f64| {
        let lb = (alpha(lx, lambda_y) - lx * (1.0 + lx) / lambda_y * series).max(0.0);
        upper_bound(lx, lambda_y) - lb
    };
    let mut best = GapSearch {
        rho: f64::NEG_INFINITY,
        at_lambda_x: f64::NAN,
    };
    for i in 1..=points {
        let lx = lambda_x_max * i as f64 / points as f64;
        let g = gap(lx);
        if g > best.rho {
            best = GapSearch {
                rho: g,
                at_lambda_x: lx,
            };
        }
    }
    Ok(best)
}

pub fn max_gap(lambda_y: f64, lambda_x_max: f64) -> Result<f64> {
    Ok(max_gap_on_grid(lambda_y, lambda_x_max, GAP_GRID_POINTS)?.rho)
}
