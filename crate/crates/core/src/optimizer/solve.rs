use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::golden::golden_section_maximize;
use super::utility::{utility, utility_at, UtilityConfig};
use crate::error::{Error, Result};
use crate::stochastic::{
    derive_seed, estimate_p, inverse_mean_factor, max_gap, upper_bound, ArrivalModel,
};

pub const LAMBDA_TOLERANCE: f64 = 1e-4;

/// Rate at which the upper bound reaches `p`: inverts `alpha / (1 + alpha) = p`.
fn rate_for_upper_bound(p: f64, lambda_y: f64) -> f64 {
    p / (1.0 - p) / inverse_mean_factor(lambda_y)
}

/// Open interval of fishing rates where every log in the utility is finite
/// when `p` is the upper bound. The left end is where the bound hits
/// `p_min`; the right end is `lambda_x_max`, pulled in to where the reward
/// would reach the deposit if the reward curve can exceed it.
pub fn feasible_interval(config: &UtilityConfig) -> Result<(f64, f64)> {
    config.validate()?;
    let lo = rate_for_upper_bound(config.p_min, config.lambda_y);
    let mut hi = config.lambda_x_max;

    let reward = &config.reward;
    if reward.r_max > config.deposit {
        match reward.probability_for(config.deposit) {
            Some(p_cap) if p_cap <= 0.0 => hi = 0.0,
            Some(p_cap) if p_cap < 1.0 => {
                hi = hi.min(rate_for_upper_bound(p_cap, config.lambda_y));
            }
            Some(_) => {}
            // flat curve: either always below the deposit or never
            None => {
                if reward.reward(0.0) >= config.deposit {
                    hi = 0.0;
                }
            }
        }
    }

    if lo >= hi {
        return Err(Error::EmptyFeasibleRegion { lo, hi });
    }
    Ok((lo, hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub lambda_x_star: f64,
    pub mu1: f64,
    pub p_star: f64,
    pub reward_star: f64,
    pub rho: f64,
    pub margin: f64,
    pub accuracy: f64,
    pub feasible_lo: f64,
    pub feasible_hi: f64,
    pub lambda_y: f64,
}

/// Maximizes the utility with the upper bound standing in for the true
/// fishing share. That objective is concave in the rate, so golden-section
/// search on the feasible interval finds the global optimum.
pub fn solve_op1(config: &UtilityConfig) -> Result<OptimizationResult> {
    let (lo, hi) = feasible_interval(config)?;
    let ly = config.lambda_y;
    let best = golden_section_maximize(
        |lx| utility(lx, config, |x| upper_bound(x, ly)),
        lo,
        hi,
        LAMBDA_TOLERANCE,
    );
    let rho = max_gap(ly, config.lambda_x_max)?;
    let margin = config.lipschitz * rho;
    let p_star = upper_bound(best.x, ly);
    Ok(OptimizationResult {
        lambda_x_star: best.x,
        mu1: best.value,
        p_star,
        reward_star: config.reward.reward(p_star),
        rho,
        margin,
        accuracy: 1.0 - margin / best.value.abs(),
        feasible_lo: lo,
        feasible_hi: hi,
        lambda_y: ly,
    })
}

/// `points` rates strictly inside the feasible interval, evenly spaced.
pub fn feasible_grid(config: &UtilityConfig, points: usize) -> Result<Vec<f64>> {
    if points == 0 {
        return Err(Error::invalid("grid_points", "need at least one point"));
    }
    let (lo, hi) = feasible_interval(config)?;
    let step = (hi - lo) / (points + 1) as f64;
    Ok((1..=points).map(|i| lo + step * i as f64).collect())
}

/// Grid maximizer of `U(p_fn(lx), lx)`; returns `(lx, U)`.
pub fn grid_maximize(
    config: &UtilityConfig,
    points: usize,
    p_fn: impl Fn(f64) -> f64 + Sync,
) -> Result<(f64, f64)> {
    let grid = feasible_grid(config, points)?;
    let values: Vec<f64> = grid.par_iter().map(|&lx| utility(lx, config, &p_fn)).collect();
    Ok(argmax(&grid, &values))
}

fn argmax(xs: &[f64], values: &[f64]) -> (f64, f64) {
    let mut best = (xs[0], values[0]);
    for (&x, &v) in xs.iter().zip(values).skip(1) {
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McGridSolution {
    pub lambda_x_hat: f64,
    pub mu_hat: f64,
    pub p_hat: f64,
    pub p_std_error: f64,
    /// Standard error of `mu_hat` from the Monte Carlo error in `p_hat`,
    /// propagated through the utility by a central difference.
    pub mu_sigma: f64,
    pub grid_points: usize,
    pub samples_per_point: u64,
    pub seed: u64,
}

/// Brute-force oracle for the original problem: estimate the fishing share
/// by simulation at each grid rate and keep the best utility.
pub fn grid_solve_op_mc(
    config: &UtilityConfig,
    grid_points: usize,
    samples_per_point: u64,
    seed: u64,
) -> Result<McGridSolution> {
    let grid = feasible_grid(config, grid_points)?;
    let estimates = grid
        .par_iter()
        .enumerate()
        .map(|(i, &lx)| {
            let model = ArrivalModel::new(lx, config.lambda_y)?;
            estimate_p(&model, samples_per_point, derive_seed(seed, i as u64))
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = grid
        .iter()
        .zip(&estimates)
        .map(|(&lx, e)| utility_at(e.mean, lx, config))
        .collect();

    let best = (0..grid.len())
        .reduce(|b, i| if values[i] > values[b] { i } else { b })
        .expect("grid is non-empty");
    let (lx, est) = (grid[best], estimates[best]);
    let up = utility_at(est.mean + est.std_error, lx, config);
    let down = utility_at(est.mean - est.std_error, lx, config);
    let mu_sigma = if up.is_finite() && down.is_finite() {
        0.5 * (up - down).abs()
    } else {
        f64::INFINITY
    };

    Ok(McGridSolution {
        lambda_x_hat: lx,
        mu_hat: values[best],
        p_hat: est.mean,
        p_std_error: est.std_error,
        mu_sigma,
        grid_points,
        samples_per_point,
        seed,
    })
}
