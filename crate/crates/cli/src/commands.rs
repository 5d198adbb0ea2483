use std::path::{Path, PathBuf};

use entrapnet_core::optimizer::{grid_solve_op_mc, solve_op1, sweep_deposit, UtilityConfig};
use entrapnet_core::simulator::{run_with_trace, SimTrace};
use entrapnet_core::stochastic::{bounds, derive_seed, estimate_p, ArrivalModel};
use entrapnet_core::verification::adjudicate;
use serde_json::Value;

use crate::config::{BoundsSection, RunConfigFile};
use crate::error::{CliError, CliResult};
use crate::format::{canonical_json, real};

pub const BOUNDS_HEADER: [&str; 4] = ["lambda_x", "lambda_y", "lb", "ub"];
pub const MC_HEADER: [&str; 4] = ["mc_mean", "mc_stderr", "samples", "seed"];
pub const SWEEP_HEADER: [&str; 8] = [
    "deposit",
    "c1",
    "c2",
    "lambda_x_star",
    "mu1",
    "p_star",
    "reward_star",
    "error",
];
pub const TRAJECTORY_HEADER: [&str; 4] = ["slot", "balance", "catches", "empirical_p"];
pub const DEFAULT_MC_GRID: usize = 100;

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub mc: bool,
}

impl Options {
    pub fn load(&self) -> CliResult<RunConfigFile> {
        match &self.config {
            Some(path) => RunConfigFile::load(path),
            None => Ok(RunConfigFile::default()),
        }
    }

    fn seed(&self, cfg: &RunConfigFile) -> u64 {
        self.seed.unwrap_or(cfg.seed)
    }

    fn samples(&self, cfg: &RunConfigFile) -> CliResult<u64> {
        match self.samples {
            Some(0) => Err(CliError::Usage("--samples must be >= 1".into())),
            Some(n) => Ok(n),
            None => Ok(cfg.samples()),
        }
    }
}

fn section<'a, T>(s: &'a Option<T>, name: &str) -> CliResult<&'a T> {
    s.as_ref()
        .ok_or_else(|| CliError::Usage(format!("config has no `{name}` section")))
}

/// Range flags override the config's `bounds` section field by field.
#[derive(Debug, Clone, Copy, Default)]
pub struct RangeOverride {
    pub lambda_y: Option<f64>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub step: Option<f64>,
}

impl RangeOverride {
    fn resolve(&self, cfg: &RunConfigFile) -> CliResult<BoundsSection> {
        let base = cfg.bounds;
        let pick = |flag: Option<f64>, field: Option<f64>, name: &str| {
            flag.or(field)
                .ok_or_else(|| CliError::Usage(format!("missing {name}: set it in `bounds` or pass the flag")))
        };
        let b = BoundsSection {
            lambda_y: pick(self.lambda_y, base.map(|b| b.lambda_y), "lambda_y")?,
            lambda_x_from: pick(self.from, base.map(|b| b.lambda_x_from), "lambda_x_from")?,
            lambda_x_to: pick(self.to, base.map(|b| b.lambda_x_to), "lambda_x_to")?,
            step: pick(self.step, base.map(|b| b.step), "step")?,
        };
        if !(b.step.is_finite() && b.step > 0.0) {
            return Err(CliError::Usage("step must be > 0".into()));
        }
        if !(b.lambda_x_from.is_finite() && b.lambda_x_to.is_finite() && b.lambda_x_from >= 0.0) {
            return Err(CliError::Usage("range must be finite and start at >= 0".into()));
        }
        Ok(b)
    }
}

/// `from, from + step, ...` up to `to`; empty when `to < from`.
pub fn rate_grid(b: &BoundsSection) -> Vec<f64> {
    if b.lambda_x_to < b.lambda_x_from {
        return Vec::new();
    }
    // tolerate the rounding in (to - from) / step
    let n = ((b.lambda_x_to - b.lambda_x_from) / b.step + 1e-9).floor() as usize + 1;
    (0..n).map(|i| b.lambda_x_from + b.step * i as f64).collect()
}

pub fn bounds_table(range: &BoundsSection, mc: Option<(u64, u64)>) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = BOUNDS_HEADER.to_vec();
    if mc.is_some() {
        header.extend(MC_HEADER);
    }
    w.write_record(&header)?;
    for (i, lx) in rate_grid(range).into_iter().enumerate() {
        let ly = range.lambda_y;
        let b = bounds(lx, ly)?;
        let mut row = vec![real(lx), real(ly), real(b.lower), real(b.upper)];
        if let Some((samples, seed)) = mc {
            let row_seed = derive_seed(seed, i as u64);
            let e = estimate_p(&ArrivalModel::new(lx, ly)?, samples, row_seed)?;
            row.extend([real(e.mean), real(e.std_error), samples.to_string(), row_seed.to_string()]);
        }
        w.write_record(&row)?;
    }
    finish_csv(w)
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> CliResult<String> {
    let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
}

pub fn cmd_bounds(opts: &Options, range: &RangeOverride, force_mc: bool) -> CliResult<String> {
    let cfg = opts.load()?;
    let b = range.resolve(&cfg)?;
    let mc = if opts.mc || force_mc {
        Some((opts.samples(&cfg)?, opts.seed(&cfg)))
    } else {
        None
    };
    bounds_table(&b, mc)
}

pub fn cmd_optimize(opts: &Options) -> CliResult<String> {
    let cfg = opts.load()?;
    let utility = section(&cfg.utility, "utility")?;
    let result = solve_op1(utility)?;
    let mut out = serde_json::to_value(result)?;
    if opts.mc {
        let points = cfg.monte_carlo.map_or(DEFAULT_MC_GRID, |m| m.grid_points);
        let mc = grid_solve_op_mc(utility, points, opts.samples(&cfg)?, opts.seed(&cfg))?;
        out["monte_carlo"] = serde_json::to_value(mc)?;
    }
    canonical_json(&out)
}

pub fn cmd_sweep(opts: &Options, deposits: Option<&[f64]>) -> CliResult<String> {
    let cfg = opts.load()?;
    let utility = section(&cfg.utility, "utility")?;
    let deposits = match (deposits, &cfg.sweep) {
        (Some(d), _) => d.to_vec(),
        (None, Some(s)) => s.deposits.clone(),
        (None, None) => return Err(CliError::Usage("no deposits: add a `sweep` section or pass --deposits".into())),
    };
    if deposits.is_empty() {
        return Err(CliError::Usage("deposit list is empty".into()));
    }
    let c1_values = cfg
        .sweep
        .as_ref()
        .and_then(|s| s.c1_values.clone())
        .unwrap_or_else(|| vec![utility.c1]);

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_HEADER)?;
    for c1 in c1_values {
        for row in sweep_deposit(&UtilityConfig { c1, ..*utility }, &deposits) {
            let mut rec = vec![real(row.deposit), real(row.c1), real(row.c2)];
            match &row.result {
                Ok(r) => {
                    rec.extend([r.lambda_x_star, r.mu1, r.p_star, r.reward_star].map(real));
                    rec.push(String::new());
                }
                Err(e) => {
                    rec.extend(std::iter::repeat(String::new()).take(4));
                    rec.push(e.to_string());
                }
            }
            w.write_record(&rec)?;
        }
    }
    finish_csv(w)
}

pub struct SimulateOutput {
    pub summary: String,
    pub trajectory: Option<(PathBuf, String)>,
}

pub fn cmd_simulate(opts: &Options, trajectory: Option<&Path>) -> CliResult<SimulateOutput> {
    let cfg = opts.load()?;
    let mut sim = *section(&cfg.simulation, "simulation")?;
    if let Some(seed) = opts.seed {
        sim.seed = seed;
    }
    let (report, trace) = run_with_trace(&sim)?;
    let mut summary = serde_json::to_value(&report)?;
    if let Value::Object(map) = &mut summary {
        // per-slot balances go to the trajectory CSV instead
        map.remove("pool_trajectory");
    }
    let path = trajectory.map(Path::to_path_buf).or_else(|| cfg.outputs.trajectory.clone());
    let trajectory = match path {
        Some(p) => Some((p, trajectory_csv(&trace)?)),
        None => None,
    };
    Ok(SimulateOutput {
        summary: canonical_json(&summary)?,
        trajectory,
    })
}

pub fn trajectory_csv(trace: &SimTrace) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(TRAJECTORY_HEADER)?;
    for t in &trace.trajectory {
        w.write_record([t.slot.to_string(), real(t.balance), t.catches.to_string(), real(t.empirical_p)])?;
    }
    finish_csv(w)
}

pub fn cmd_adjudicate(opts: &Options) -> CliResult<String> {
    let cfg = opts.load()?;
    let a = section(&cfg.appeal, "appeal")?;
    canonical_json(&adjudicate(&a.appeal, &a.view, &a.tolerances)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn range(from: f64, to: f64, step: f64) -> BoundsSection {
        BoundsSection {
            lambda_y: 1000.0,
            lambda_x_from: from,
            lambda_x_to: to,
            step,
        }
    }

    #[test]
    fn grid_shapes() {
        assert_eq!(rate_grid(&range(80.0, 100.0, 1.0)).len(), 21);
        assert!(rate_grid(&range(5.0, 4.0, 1.0)).is_empty());
        assert_eq!(rate_grid(&range(1.0, 2.0, 5.0)), vec![1.0]);
        assert_eq!(rate_grid(&range(0.0, 0.3, 0.1)).len(), 4);
    }

    #[test]
    fn empty_range_is_header_only() {
        let s = bounds_table(&range(5.0, 4.0, 1.0), None).unwrap();
        assert_eq!(s, "lambda_x,lambda_y,lb,ub\n");
        let s = bounds_table(&range(5.0, 4.0, 1.0), Some((10, 1))).unwrap();
        assert_eq!(s, "lambda_x,lambda_y,lb,ub,mc_mean,mc_stderr,samples,seed\n");
    }

    #[test]
    fn bounds_rows_use_twelve_digits() {
        let s = bounds_table(&range(33.4, 33.4, 1.0), None).unwrap();
        assert_eq!(s.lines().nth(1).unwrap(), "33.4,1000,0.0322498887352,0.0323204954519");
    }
}
