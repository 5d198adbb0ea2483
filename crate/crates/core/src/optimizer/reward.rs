use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Logistic map from the security level `p` to an officer reward:
/// `R(p) = r_max / (1 + exp(-(slope * p - offset)))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewardModel {
    pub r_max: f64,
    pub slope: f64,
    pub offset: f64,
}

impl Default for RewardModel {
    fn default() -> Self {
        Self {
            r_max: 105.0,
            slope: 100.0,
            offset: 5.0,
        }
    }
}

impl RewardModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_max.is_finite() && self.r_max > 0.0) {
            return Err(Error::invalid("reward.r_max", "must be finite and > 0"));
        }
        if !(self.slope.is_finite() && self.slope >= 0.0) {
            return Err(Error::invalid("reward.slope", "must be finite and >= 0"));
        }
        if !self.offset.is_finite() {
            return Err(Error::invalid("reward.offset", "must be finite"));
        }
        Ok(())
    }

    pub fn reward(&self, p: f64) -> f64 {
        self.r_max / (1.0 + (-(self.slope * p - self.offset)).exp())
    }

    /// `dR/dp`.
    pub fn derivative(&self, p: f64) -> f64 {
        let r = self.reward(p);
        self.slope * r * (1.0 - r / self.r_max)
    }

    /// The `p` at which the reward equals `r`, if the curve reaches it.
    pub fn probability_for(&self, r: f64) -> Option<f64> {
        if self.slope == 0.0 || !(r > 0.0 && r < self.r_max) {
            return None;
        }
        Some((self.offset - (self.r_max / r - 1.0).ln()) / self.slope)
    }
}

pub fn reward(p: f64, model: &RewardModel) -> f64 {
    model.reward(p)
}
