use serde::{Deserialize, Serialize};

use crate::domain::{check_officer_deposit, Behavior};
use crate::error::{Error, Result};
use crate::optimizer::RewardModel;
use crate::stochastic::ArrivalModel;
use crate::verification::{Tolerances, DEFAULT_MIN_WITNESSES};

fn default_officers() -> usize {
    4
}
fn default_witnesses() -> usize {
    DEFAULT_MIN_WITNESSES
}
fn default_repository_size() -> usize {
    64
}
fn default_corruption() -> f64 {
    Behavior::DEFAULT_CORRUPTION
}
fn default_reward_window() -> usize {
    100
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub slots: u64,
    pub arrival: ArrivalModel,
    pub providers: usize,
    pub malicious_fraction: f64,
    pub deposit: f64,
    pub officer_deposit: f64,
    #[serde(default)]
    pub reward: RewardModel,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub seed: u64,
    pub task_dimension: usize,
    #[serde(default = "default_officers")]
    pub officers: usize,
    #[serde(default = "default_witnesses")]
    pub witnesses: usize,
    /// Records each officer holds before the run starts.
    #[serde(default = "default_repository_size")]
    pub repository_size: usize,
    /// Relative error a faulty provider injects.
    #[serde(default = "default_corruption")]
    pub corruption: f64,
    /// Slots averaged into the security level that prices each reward.
    #[serde(default = "default_reward_window")]
    pub reward_window: usize,
    #[serde(default)]
    pub initial_pool: f64,
}

impl SimConfig {
    /// Ethereum-scale setting at the optimized fishing rate.
    pub fn reference(slots: u64, seed: u64) -> Self {
        Self {
            slots,
            arrival: ArrivalModel {
                lambda_x: 33.4,
                lambda_y: 1000.0,
            },
            providers: 50,
            malicious_fraction: 0.2,
            deposit: 100.0,
            officer_deposit: 10.0,
            reward: RewardModel::default(),
            tolerances: Tolerances::default(),
            seed,
            task_dimension: 8,
            officers: default_officers(),
            witnesses: default_witnesses(),
            repository_size: default_repository_size(),
            corruption: default_corruption(),
            reward_window: default_reward_window(),
            initial_pool: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.arrival.validate()?;
        self.reward.validate()?;
        self.tolerances.validate()?;
        if self.providers == 0 {
            return Err(Error::invalid("providers", "need at least one provider"));
        }
        if !(0.0..=1.0).contains(&self.malicious_fraction) {
            return Err(Error::invalid("malicious_fraction", "must lie in [0, 1]"));
        }
        if !(self.deposit.is_finite() && self.deposit >= 0.0) {
            return Err(Error::invalid("deposit", "must be finite and >= 0"));
        }
        check_officer_deposit(self.officer_deposit, self.deposit)?;
        if self.officer_deposit <= 0.0 {
            return Err(Error::invalid("officer_deposit", "an appeal needs a stake > 0"));
        }
        if self.task_dimension == 0 {
            return Err(Error::invalid("task_dimension", "must be >= 1"));
        }
        if self.officers == 0 {
            return Err(Error::invalid("officers", "need at least one officer"));
        }
        if self.witnesses == 0 {
            return Err(Error::invalid("witnesses", "need at least one witness"));
        }
        if self.reward_window == 0 {
            return Err(Error::invalid("reward_window", "must be >= 1"));
        }
        Behavior::faulty(self.corruption)?;
        if !(self.initial_pool.is_finite() && self.initial_pool >= 0.0) {
            return Err(Error::invalid("initial_pool", "must be finite and >= 0"));
        }
        Ok(())
    }

    pub fn faulty_count(&self) -> usize {
        (self.malicious_fraction * self.providers as f64).round() as usize
    }
}
