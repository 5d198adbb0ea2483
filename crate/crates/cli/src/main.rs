use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use entrapnet_cli::commands::{self, Options, RangeOverride};
use entrapnet_cli::{CliError, CliResult};

/// Entrapment-based verification: bounds, rate optimization, deposit sweeps,
/// protocol simulation and appeal adjudication.
#[derive(Parser, Debug)]
#[command(name = "entrapnet", version)]
struct Cli {
    /// JSON run config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the seed from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo draws per point.
    #[arg(long, global = true)]
    samples: Option<u64>,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Add the Monte Carlo columns / cross-check.
    #[arg(long, global = true)]
    mc: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct Range {
    #[arg(long)]
    lambda_y: Option<f64>,
    #[arg(long)]
    from: Option<f64>,
    #[arg(long)]
    to: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
}

impl From<Range> for RangeOverride {
    fn from(r: Range) -> Self {
        RangeOverride {
            lambda_y: r.lambda_y,
            from: r.from,
            to: r.to,
            step: r.step,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lower/upper bounds on the fishing share across a rate range (CSV).
    Bounds(Range),
    /// Bounds plus the Monte Carlo estimate for every row (CSV).
    Estimate(Range),
    /// Optimal fishing rate for the `utility` section (JSON).
    Optimize,
    /// Optimum per deposit and per c1 (CSV).
    Sweep {
        #[arg(long, value_delimiter = ',')]
        deposits: Option<Vec<f64>>,
    },
    /// Run the `simulation` section (JSON summary, optional CSV trajectory).
    Simulate {
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
    /// Judge the `appeal` section (JSON).
    Adjudicate,
}

fn write(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::io(format!("writing {}", p.display()), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let opts = Options {
        config: cli.config,
        seed: cli.seed,
        samples: cli.samples,
        mc: cli.mc,
    };
    let out = cli.out.as_deref();
    match cli.command {
        Command::Bounds(r) => write(out, &commands::cmd_bounds(&opts, &r.into(), false)?),
        Command::Estimate(r) => write(out, &commands::cmd_bounds(&opts, &r.into(), true)?),
        Command::Optimize => write(out, &commands::cmd_optimize(&opts)?),
        Command::Sweep { deposits } => write(out, &commands::cmd_sweep(&opts, deposits.as_deref())?),
        Command::Simulate { trajectory } => {
            let result = commands::cmd_simulate(&opts, trajectory.as_deref())?;
            if let Some((path, csv)) = &result.trajectory {
                write(Some(path), csv)?;
            }
            write(out, &result.summary)
        }
        Command::Adjudicate => write(out, &commands::cmd_adjudicate(&opts)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
