//! Logarithmic security/efficiency utility.
//!
//! ```text
//! U(p, lx) = ln(1 - p_min / p) + c1 ln(1 - lx / lx_max) + c2 ln(1 - R(p) / D)
//! ```
//!
//! Natural logarithms throughout. Any non-positive log argument makes the
//! point infeasible, reported as `f64::NEG_INFINITY`.

use serde::{Deserialize, Serialize};

use super::reward::RewardModel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtilityConfig {
    pub p_min: f64,
    pub lambda_x_max: f64,
    pub c1: f64,
    pub c2: f64,
    pub deposit: f64,
    pub lipschitz: f64,
    #[serde(default)]
    pub reward: RewardModel,
    pub lambda_y: f64,
}

impl Default for UtilityConfig {
    /// Ethereum-scale example: 1000 regular tasks per one-minute slot,
    /// at most 120 fishing tasks per slot, deposit 100.
    fn default() -> Self {
        Self {
            p_min: 0.01,
            lambda_x_max: 120.0,
            c1: 1.0,
            c2: 0.1,
            deposit: 100.0,
            lipschitz: 1.0,
            reward: RewardModel::default(),
            lambda_y: 1000.0,
        }
    }
}

impl UtilityConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.p_min > 0.0 && self.p_min < 1.0) {
            return Err(Error::invalid("p_min", "must lie in (0, 1)"));
        }
        if !(self.lambda_x_max.is_finite() && self.lambda_x_max > 0.0) {
            return Err(Error::invalid("lambda_x_max", "must be finite and > 0"));
        }
        if !(self.deposit.is_finite() && self.deposit > 0.0) {
            return Err(Error::invalid("deposit", "must be finite and > 0"));
        }
        for (name, v) in [("c1", self.c1), ("c2", self.c2), ("lipschitz", self.lipschitz)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(name, "must be finite and >= 0"));
            }
        }
        if !(self.lambda_y.is_finite() && self.lambda_y >= 0.0) {
            return Err(Error::invalid("lambda_y", "must be finite and >= 0"));
        }
        self.reward.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilityTerms {
    pub security: f64,
    pub efficiency: f64,
    pub profitability: f64,
}

impl UtilityTerms {
    pub fn total(&self) -> f64 {
        self.security + self.efficiency + self.profitability
    }
}

/// The three weighted terms at security level `p` and fishing rate
/// `lambda_x`, or `None` outside the domain of the logs.
pub fn utility_terms(p: f64, lambda_x: f64, config: &UtilityConfig) -> Option<UtilityTerms> {
    let security = 1.0 - config.p_min / p;
    let efficiency = 1.0 - lambda_x / config.lambda_x_max;
    let profitability = 1.0 - config.reward.reward(p) / config.deposit;
    // NaN arguments fall through as infeasible too
    if !(p > 0.0 && lambda_x > 0.0 && security > 0.0 && efficiency > 0.0 && profitability > 0.0) {
        return None;
    }
    Some(UtilityTerms {
        security: security.ln(),
        efficiency: config.c1 * efficiency.ln(),
        profitability: config.c2 * profitability.ln(),
    })
}

/// `U(p, lambda_x)` with the security level given directly.
pub fn utility_at(p: f64, lambda_x: f64, config: &UtilityConfig) -> f64 {
    utility_terms(p, lambda_x, config).map_or(f64::NEG_INFINITY, |t| t.total())
}

/// `U(p_fn(lambda_x), lambda_x)`.
pub fn utility(lambda_x: f64, config: &UtilityConfig, p_fn: impl Fn(f64) -> f64) -> f64 {
    if !(lambda_x > 0.0 && lambda_x < config.lambda_x_max) {
        return f64::NEG_INFINITY;
    }
    utility_at(p_fn(lambda_x), lambda_x, config)
}

/// Analytic gradient of `U(a, b)` with respect to (security level, rate).
pub fn utility_gradient(p: f64, lambda_x: f64, config: &UtilityConfig) -> Option<(f64, f64)> {
    utility_terms(p, lambda_x, config)?;
    let r = config.reward.reward(p);
    let d_security = config.p_min / (p * (p - config.p_min));
    let d_profit = -config.c2 * config.reward.derivative(p) / (config.deposit - r);
    let d_rate = -config.c1 / (config.lambda_x_max - lambda_x);
    Some((d_security + d_profit, d_rate))
}
