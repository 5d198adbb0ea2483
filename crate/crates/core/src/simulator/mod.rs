//! Slot-by-slot execution of the protocol: arrivals, the imposed task,
//! uniform scheduling, entrapment, adjudication and the incentive pool.
//!
//! One run is a single-threaded loop and fully determined by its config.

mod config;
mod engine;
mod ledger;
mod scheduler;

pub use config::SimConfig;
pub use engine::{run, run_with_trace, Consumption, FishingAssignment, SimReport, SimTrace, TrajectoryPoint};
pub use ledger::{check_conservation, IncentivePool, LedgerEntry, Payout};
pub use scheduler::{assign_uniform, chi_square_statistic};
