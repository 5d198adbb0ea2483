//! Poisson variates.
//!
//! Small means use inversion by sequential search. From `INVERSION_LIMIT`
//! upward we switch to Hörmann's transformed rejection with squeeze (PTRS),
//! which has bounded expected cost and never forms `lambda^k` or `k!`
//! directly, so it stays well-behaved at `lambda` in the thousands.

use rand::Rng;

use crate::error::{Error, Result};

pub const INVERSION_LIMIT: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Poisson {
    lambda: f64,
    method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Method {
    Zero,
    Inversion {
        exp_neg_lambda: f64,
    },
    Ptrs {
        ln_lambda: f64,
        b: f64,
        a: f64,
        ln_inv_alpha: f64,
        v_r: f64,
    },
}

impl Poisson {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::invalid("lambda", format!("{lambda} is not a finite rate >= 0")));
        }
        let method = if lambda == 0.0 {
            Method::Zero
        } else if lambda < INVERSION_LIMIT {
            Method::Inversion {
                exp_neg_lambda: (-lambda).exp(),
            }
        } else {
            let slam = lambda.sqrt();
            let b = 0.931 + 2.53 * slam;
            let a = -0.059 + 0.02483 * b;
            let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
            Method::Ptrs {
                ln_lambda: lambda.ln(),
                b,
                a,
                ln_inv_alpha: inv_alpha.ln(),
                v_r: 0.9277 - 3.6224 / (b - 2.0),
            }
        };
        Ok(Self { lambda, method })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match self.method {
            Method::Zero => 0,
            Method::Inversion { exp_neg_lambda } => {
                let u: f64 = rng.random();
                let mut k = 0u64;
                let mut p = exp_neg_lambda;
                let mut cdf = p;
                // the cap only matters when u rounds to within ~1e-16 of 1
                while u > cdf && k < 1000 {
                    k += 1;
                    p *= self.lambda / k as f64;
                    cdf += p;
                }
                k
            }
            Method::Ptrs {
                ln_lambda,
                b,
                a,
                ln_inv_alpha,
                v_r,
            } => loop {
                let u = rng.random::<f64>() - 0.5;
                let v: f64 = rng.random();
                let us = 0.5 - u.abs();
                let k = ((2.0 * a / us + b) * u + self.lambda + 0.43).floor();
                if us >= 0.07 && v <= v_r {
                    return k as u64;
                }
                if k < 0.0 || (us < 0.013 && v > us) {
                    continue;
                }
                let lhs = v.ln() + ln_inv_alpha - (a / (us * us) + b).ln();
                let rhs = -self.lambda + k * ln_lambda - ln_factorial(k as u64);
                if lhs <= rhs {
                    return k as u64;
                }
            },
        }
    }
}

/// `ln(k!)`: exact summation below 16, Stirling series above.
pub fn ln_factorial(k: u64) -> f64 {
    if k < 16 {
        return (2..=k).map(|i| (i as f64).ln()).sum();
    }
    let n = k as f64;
    let inv = 1.0 / n;
    let inv2 = inv * inv;
    // 1/(12n) - 1/(360n^3) + 1/(1260n^5) - 1/(1680n^7)
    let tail = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
    (n + 0.5) * n.ln() - n + 0.5 * (2.0 * std::f64::consts::PI).ln() + tail
}
