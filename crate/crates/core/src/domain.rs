//! Shared protocol types: result vectors, tasks and participant accounts.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::record::Repository;

/// Output of a computing task. Always non-empty with finite entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ResultVector(Vec<f64>);

impl ResultVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        euclidean_norm(&self.0)
    }

    /// Multiplies every entry by `factor`. Panics if the product overflows.
    pub fn scaled(&self, factor: f64) -> ResultVector {
        ResultVector::new(self.0.iter().map(|v| v * factor).collect())
            .expect("scaling a finite vector by a finite factor stays finite")
    }

    /// Unit vector in the same direction; rejects the zero vector.
    pub fn normalized(&self) -> Option<Vec<f64>> {
        let n = self.norm();
        (n > 0.0).then(|| self.0.iter().map(|v| v / n).collect())
    }

    pub fn distance(&self, other: &ResultVector) -> Result<f64> {
        self.check_dim(other)?;
        Ok(euclidean_distance(&self.0, &other.0))
    }

    pub(crate) fn check_dim(&self, other: &ResultVector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for ResultVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        ResultVector::new(values)
    }
}

impl From<ResultVector> for Vec<f64> {
    fn from(v: ResultVector) -> Self {
        v.0
    }
}

// Scaled accumulation so that very large or very small entries do not overflow.
pub(crate) fn euclidean_norm(values: &[f64]) -> f64 {
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let sum: f64 = values.iter().map(|v| (v / scale) * (v / scale)).sum();
    scale * sum.sqrt()
}

pub(crate) fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    euclidean_norm(&diff)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AccountId(pub u32);

impl fmt::Display for AccountId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TaskId(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Regular,
    Fishing,
    /// The one task witnesses submit every slot so the queue is never empty.
    Imposed,
}

impl TaskKind {
    /// Imposed tasks are indistinguishable from regular ones once queued.
    pub fn is_fishing(self) -> bool {
        matches!(self, TaskKind::Fishing)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: TaskId,
    pub kind: TaskKind,
    #[serde(with = "crate::record::hex_bytes")]
    pub script_digest: Vec<u8>,
    pub submitter: AccountId,
    pub slot: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Behavior {
    Honest,
    /// Corrupts results by adding `corruption * ||Y||` to the first coordinate.
    Faulty { corruption: f64 },
}

impl Behavior {
    pub const DEFAULT_CORRUPTION: f64 = 1.0;

    pub fn faulty(corruption: f64) -> Result<Self> {
        if !(corruption.is_finite() && corruption > 0.0) {
            return Err(Error::invalid("corruption", "must be finite and > 0"));
        }
        Ok(Behavior::Faulty { corruption })
    }

    pub fn is_faulty(&self) -> bool {
        matches!(self, Behavior::Faulty { .. })
    }

    /// What a provider with this behavior returns for a task whose true result is `truth`.
    pub fn execute(&self, truth: &ResultVector) -> ResultVector {
        match *self {
            Behavior::Honest => truth.clone(),
            Behavior::Faulty { corruption } => {
                let mut values = truth.values().to_vec();
                values[0] += corruption * truth.norm();
                ResultVector::new(values).expect("corrupted result stays finite")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderAccount {
    pub id: AccountId,
    deposit: f64,
    pub behavior: Behavior,
    active: bool,
}

impl ProviderAccount {
    pub fn new(id: AccountId, deposit: f64, behavior: Behavior) -> Result<Self> {
        if !(deposit.is_finite() && deposit >= 0.0) {
            return Err(Error::invalid("deposit", "must be finite and >= 0"));
        }
        Ok(Self {
            id,
            deposit,
            behavior,
            active: true,
        })
    }

    pub fn deposit(&self) -> f64 {
        self.deposit
    }

    pub fn is_active(&self) -> bool {
        self.active
    }

    /// Takes the whole deposit and deactivates the account. Returns the amount taken.
    pub fn forfeit(&mut self) -> f64 {
        let taken = self.deposit;
        self.deposit = 0.0;
        self.active = false;
        taken
    }
}

/// An officer's deposit must stay small relative to what providers stake.
pub const OFFICER_DEPOSIT_RATIO: f64 = 0.1;

pub fn check_officer_deposit(officer_deposit: f64, provider_deposit: f64) -> Result<()> {
    if !(officer_deposit.is_finite() && officer_deposit >= 0.0) {
        return Err(Error::invalid("officer_deposit", "must be finite and >= 0"));
    }
    if officer_deposit > provider_deposit * OFFICER_DEPOSIT_RATIO {
        return Err(Error::invalid(
            "officer_deposit",
            format!(
                "{officer_deposit} exceeds {OFFICER_DEPOSIT_RATIO} x provider deposit {provider_deposit}"
            ),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct OfficerAccount {
    pub id: AccountId,
    pub repository: Repository,
    officer_deposit: f64,
}

impl OfficerAccount {
    pub fn new(id: AccountId, officer_deposit: f64, provider_deposit: f64) -> Result<Self> {
        check_officer_deposit(officer_deposit, provider_deposit)?;
        Ok(Self {
            id,
            repository: Repository::default(),
            officer_deposit,
        })
    }

    pub fn officer_deposit(&self) -> f64 {
        self.officer_deposit
    }
}
