use std::fs;
use std::path::{Path, PathBuf};

use entrapnet_core::optimizer::UtilityConfig;
use entrapnet_core::simulator::SimConfig;
use entrapnet_core::verification::{Appeal, ContractView, Tolerances};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const DEFAULT_SAMPLES: u64 = 100_000;

/// One file drives every subcommand; each reads only its own section.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub samples: Option<u64>,
    #[serde(default)]
    pub bounds: Option<BoundsSection>,
    #[serde(default)]
    pub utility: Option<UtilityConfig>,
    #[serde(default)]
    pub monte_carlo: Option<McSection>,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub simulation: Option<SimConfig>,
    #[serde(default)]
    pub appeal: Option<AppealSection>,
    #[serde(default)]
    pub outputs: OutputsSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSection {
    pub lambda_y: f64,
    pub lambda_x_from: f64,
    pub lambda_x_to: f64,
    pub step: f64,
}

/// Grid for the Monte Carlo cross-check of the optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    pub grid_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub deposits: Vec<f64>,
    /// Defaults to the utility section's `c1`.
    #[serde(default)]
    pub c1_values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppealSection {
    pub appeal: Appeal,
    pub view: ContractView,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsSection {
    /// Per-slot CSV written by `simulate`.
    #[serde(default)]
    pub trajectory: Option<PathBuf>,
}

impl RunConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::parse(&text).map_err(|message| CliError::Config {
            path: path.to_path_buf(),
            message,
        })
    }

    /// Parses and validates every section present.
    pub fn parse(text: &str) -> Result<Self, String> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let check = |r: entrapnet_core::Result<()>| r.map_err(|e| e.to_string());
        if let Some(b) = &cfg.bounds {
            if !(b.step.is_finite() && b.step > 0.0) {
                return Err("bounds.step must be > 0".into());
            }
            if !(b.lambda_x_from.is_finite() && b.lambda_x_to.is_finite() && b.lambda_x_from >= 0.0) {
                return Err("bounds range must be finite with lambda_x_from >= 0".into());
            }
            if !(b.lambda_y.is_finite() && b.lambda_y > 1.0) {
                return Err("bounds.lambda_y must be > 1 for the lower bound".into());
            }
        }
        if let Some(u) = &cfg.utility {
            check(u.validate())?;
        }
        if let Some(m) = &cfg.monte_carlo {
            if m.grid_points == 0 {
                return Err("monte_carlo.grid_points must be >= 1".into());
            }
        }
        if let Some(s) = &cfg.sweep {
            if s.deposits.is_empty() {
                return Err("sweep.deposits must not be empty".into());
            }
            if cfg.utility.is_none() {
                return Err("sweep needs a utility section".into());
            }
        }
        if let Some(s) = &cfg.simulation {
            check(s.validate())?;
        }
        if let Some(a) = &cfg.appeal {
            check(a.tolerances.validate())?;
        }
        if cfg.samples == Some(0) {
            return Err("samples must be >= 1".into());
        }
        Ok(cfg)
    }

    pub fn samples(&self) -> u64 {
        self.samples.unwrap_or(DEFAULT_SAMPLES)
    }
}
