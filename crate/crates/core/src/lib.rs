//! Entrapment-based verification for outsourced computation.
//!
//! Officers seed the task stream with fishing tasks whose answers they
//! already hold. A provider that returns a wrong answer to one can be
//! proven faulty on-chain and loses its deposit.

pub mod domain;
pub mod error;
pub mod optimizer;
pub mod record;
pub mod simulator;
pub mod stochastic;
pub mod verification;

pub use error::{Error, Result};
