use rayon::prelude::*;

use super::solve::{solve_op1, OptimizationResult};
use super::utility::UtilityConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub deposit: f64,
    pub c1: f64,
    pub c2: f64,
    pub result: Result<OptimizationResult>,
}

/// Re-solves the concave problem once per deposit, other parameters fixed.
/// Rows come back in input order; a failing deposit does not stop the rest.
pub fn sweep_deposit(config: &UtilityConfig, deposits: &[f64]) -> Vec<SweepRow> {
    deposits
        .par_iter()
        .map(|&deposit| {
            let result = if deposit.is_finite() && deposit > 0.0 {
                solve_op1(&UtilityConfig { deposit, ..*config })
            } else {
                Err(Error::invalid("deposit", format!("{deposit} is not > 0")))
            };
            SweepRow {
                deposit,
                c1: config.c1,
                c2: config.c2,
                result,
            }
        })
        .collect()
}
