//! Monte Carlo estimation of `E[X / (X + Y + 1)]`.
//!
//! Samples are split into fixed-size batches. Batch `k` draws from the
//! ChaCha8 stream `k` of the caller's seed, so a batch's draws depend only
//! on `(seed, k)` and never on how batches are spread over threads. Batch
//! statistics are merged in index order, which makes the estimate
//! bitwise reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::poisson::Poisson;
use super::ArrivalModel;
use crate::error::{Error, Result};

pub const BATCH_SIZE: u64 = 1 << 16;

/// Welford accumulator with Chan et al.'s pairwise merge.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &RunningStats) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = self.count + other.count;
        let delta = other.mean - self.mean;
        let w = other.count as f64 / n as f64;
        self.mean += delta * w;
        self.m2 += other.m2 + delta * delta * self.count as f64 * w;
        self.count = n;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample variance with the `n - 1` denominator; zero below two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Draws the fishing and regular arrival counts for one slot.
#[derive(Debug, Clone, Copy)]
pub struct SlotSampler {
    fishing: Poisson,
    regular: Poisson,
}

impl SlotSampler {
    pub fn new(model: &ArrivalModel) -> Result<Self> {
        Ok(Self {
            fishing: Poisson::new(model.lambda_x)?,
            regular: Poisson::new(model.lambda_y)?,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (u64, u64) {
        let x = self.fishing.sample(rng);
        let y = self.regular.sample(rng);
        (x, y)
    }
}

pub fn sample_slot_counts<R: Rng + ?Sized>(model: &ArrivalModel, rng: &mut R) -> Result<(u64, u64)> {
    Ok(SlotSampler::new(model)?.sample(rng))
}

pub fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

/// SplitMix64 step, used to give independent runs their own seeds.
pub fn derive_seed(parent: u64, index: u64) -> u64 {
    let mut z = parent ^ index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// The `+1` is the task imposed in every slot.
#[inline]
pub fn fishing_share(x: u64, y: u64) -> f64 {
    x as f64 / (x + y + 1) as f64
}

pub(crate) fn batch_stats(sampler: &SlotSampler, seed: u64, batch: u64, len: u64) -> RunningStats {
    let mut rng = batch_rng(seed, batch);
    let mut stats = RunningStats::default();
    for _ in 0..len {
        let (x, y) = sampler.sample(&mut rng);
        stats.push(fishing_share(x, y));
    }
    stats
}

fn batch_len(samples: u64, batch: u64) -> u64 {
    (samples - batch * BATCH_SIZE).min(BATCH_SIZE)
}

pub fn estimate_p(model: &ArrivalModel, samples: u64, seed: u64) -> Result<MonteCarloEstimate> {
    if samples == 0 {
        return Err(Error::invalid("samples", "need at least one sample"));
    }
    let sampler = SlotSampler::new(model)?;
    let batches = samples.div_ceil(BATCH_SIZE);
    let parts: Vec<RunningStats> = (0..batches)
        .into_par_iter()
        .map(|b| batch_stats(&sampler, seed, b, batch_len(samples, b)))
        .collect();
    let mut total = RunningStats::default();
    for part in &parts {
        total.merge(part);
    }
    Ok(MonteCarloEstimate {
        mean: total.mean().clamp(0.0, 1.0),
        std_error: total.std_error(),
        samples,
        seed,
    })
}
