//! Result verification and the appeal judgement.
//!
//! Two checks are involved. When a fishing task is built, witness results
//! must be pairwise aligned after normalization (within `delta_val`), and
//! their mean becomes the verified result. When a provider returns a
//! fishing result `Y_f`, it is accepted iff `||Y_f - Y_bar|| / ||Y_bar||`
//! is at most `delta_ver`. Both comparisons are inclusive.

use serde::{Deserialize, Serialize};

use crate::domain::{euclidean_distance, AccountId, ResultVector, Task};
use crate::error::{Error, Result};
use crate::record::{Abstract, FishingRecord, RecordFields};

pub const DEFAULT_MARGIN: f64 = 1e-6;
pub const DEFAULT_MIN_WITNESSES: usize = 3;

/// Rounding allowance for the margin comparisons. Normalizing and taking
/// norms costs a few ulps, so a value on the boundary in exact arithmetic
/// must not be rejected because of the last bits.
const ROUNDING_ULPS: f64 = 8.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub delta_val: f64,
    pub delta_ver: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            delta_val: DEFAULT_MARGIN,
            delta_ver: DEFAULT_MARGIN,
        }
    }
}

impl Tolerances {
    pub fn new(delta_val: f64, delta_ver: f64) -> Result<Self> {
        let t = Self {
            delta_val,
            delta_ver,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        check_margin("delta_val", self.delta_val)?;
        check_margin("delta_ver", self.delta_ver)
    }
}

fn check_margin(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, "must be finite and >= 0"))
    }
}

fn check_same_dims(results: &[ResultVector]) -> Result<()> {
    if let Some(first) = results.first() {
        for r in &results[1..] {
            first.check_dim(r)?;
        }
    }
    Ok(())
}

/// True iff every pair of normalized results lies within `delta_val`.
pub fn pairwise_aligned(results: &[ResultVector], delta_val: f64) -> Result<bool> {
    check_margin("delta_val", delta_val)?;
    if results.len() < 2 {
        return Err(Error::TooFewResults {
            required: 2,
            got: results.len(),
        });
    }
    check_same_dims(results)?;
    let units = results
        .iter()
        .enumerate()
        .map(|(i, r)| r.normalized().ok_or(Error::ZeroNorm(i)))
        .collect::<Result<Vec<_>>>()?;

    for (i, a) in units.iter().enumerate() {
        for b in &units[i + 1..] {
            // unit vectors: the rounding error is absolute
            if euclidean_distance(a, b) > delta_val + ROUNDING_ULPS {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Coordinate-wise mean. Uses a running update so that N identical inputs
/// give back that input exactly.
pub fn mean_result(results: &[ResultVector]) -> Result<ResultVector> {
    let first = results.first().ok_or(Error::TooFewResults {
        required: 1,
        got: 0,
    })?;
    check_same_dims(results)?;
    let mut mean = first.values().to_vec();
    for (k, r) in results.iter().enumerate().skip(1) {
        let n = (k + 1) as f64;
        for (m, v) in mean.iter_mut().zip(r.values()) {
            *m += (v - *m) / n;
        }
    }
    ResultVector::new(mean)
}

/// The officer's check on a returned fishing result. `true` means the
/// result is acceptable.
pub fn verify_fishing_result(
    provider_result: &ResultVector,
    verified: &ResultVector,
    delta_ver: f64,
) -> Result<bool> {
    check_margin("delta_ver", delta_ver)?;
    verified.check_dim(provider_result)?;
    let scale = verified.norm();
    if scale == 0.0 {
        return Err(Error::ZeroNorm(0));
    }
    let ratio = provider_result.distance(verified)? / scale;
    Ok(ratio <= delta_ver * (1.0 + ROUNDING_ULPS))
}

/// Turns aligned witness outputs for `task` into a fishing record whose
/// verified result is their mean.
pub fn witness_validate(
    task: &Task,
    witness_results: &[ResultVector],
    tolerances: &Tolerances,
    min_witnesses: usize,
    network_proof: &[u8],
    user_key: &[u8],
) -> Result<FishingRecord> {
    let required = min_witnesses.max(1);
    if witness_results.len() < required {
        return Err(Error::TooFewResults {
            required,
            got: witness_results.len(),
        });
    }
    // A lone witness has nothing to be compared against.
    if witness_results.len() >= 2 && !pairwise_aligned(witness_results, tolerances.delta_val)? {
        return Err(Error::ResultsNotMatched {
            delta_val: tolerances.delta_val,
        });
    }
    FishingRecord::new(RecordFields {
        script_digest: task.script_digest.clone(),
        verified_result: mean_result(witness_results)?,
        network_proof: network_proof.to_vec(),
        user_key: user_key.to_vec(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Appeal {
    pub provider_result: ResultVector,
    pub record_fields: RecordFields,
    pub officer: AccountId,
    pub provider: AccountId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    RewardOfficer,
    Dismiss,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Judgement {
    pub abstract_ok: bool,
    /// Only evaluated once the abstract checks out; `false` otherwise.
    pub result_faulty: bool,
    pub outcome: Outcome,
    /// Provider deposit moved to the incentive pool.
    pub forfeit: f64,
    /// Officer deposit kept to cover the judges on a dismissed appeal.
    pub officer_deposit_spent: f64,
}

/// On-chain state the verification contract reads while judging.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractView {
    pub stored_abstract: Abstract,
    pub provider_deposit: f64,
    pub officer_deposit: f64,
}

/// Runs the three contract steps in order: fishing-task verification
/// against the stored abstract, result verification, incentive allocation.
pub fn adjudicate(appeal: &Appeal, view: &ContractView, tolerances: &Tolerances) -> Result<Judgement> {
    tolerances.validate()?;
    let verified = &appeal.record_fields.verified_result;
    if appeal.provider_result.dim() != verified.dim() {
        return Err(Error::MalformedAppeal(format!(
            "provider result has dimension {}, verified result has {}",
            appeal.provider_result.dim(),
            verified.dim()
        )));
    }
    if !(view.officer_deposit.is_finite() && view.officer_deposit > 0.0) {
        return Err(Error::MalformedAppeal(
            "officer has not posted a deposit".into(),
        ));
    }
    if !(view.provider_deposit.is_finite() && view.provider_deposit >= 0.0) {
        return Err(Error::MalformedAppeal("invalid provider deposit".into()));
    }
    if verified.norm() == 0.0 {
        return Err(Error::MalformedAppeal("verified result has zero norm".into()));
    }

    let abstract_ok = appeal.record_fields.compute_abstract()? == view.stored_abstract;
    let result_faulty =
        abstract_ok && !verify_fishing_result(&appeal.provider_result, verified, tolerances.delta_ver)?;

    Ok(if result_faulty {
        Judgement {
            abstract_ok,
            result_faulty,
            outcome: Outcome::RewardOfficer,
            forfeit: view.provider_deposit,
            officer_deposit_spent: 0.0,
        }
    } else {
        Judgement {
            abstract_ok,
            result_faulty,
            outcome: Outcome::Dismiss,
            forfeit: 0.0,
            officer_deposit_spent: view.officer_deposit,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{TaskId, TaskKind};

    fn rv(v: &[f64]) -> ResultVector {
        ResultVector::new(v.to_vec()).unwrap()
    }

    fn task() -> Task {
        Task {
            id: TaskId(7),
            kind: TaskKind::Fishing,
            script_digest: b"script".to_vec(),
            submitter: AccountId(1),
            slot: 0,
        }
    }

    #[test]
    fn identical_vectors_align_at_zero_margin() {
        let y = rv(&[0.3, -1.7, 2.2]);
        assert!(pairwise_aligned(&[y.clone(), y.clone(), y], 0.0).unwrap());
    }

    #[test]
    fn alignment_ignores_scale() {
        let y = rv(&[1.0, 2.0]);
        assert!(pairwise_aligned(&[y.clone(), y.scaled(3.0)], 0.0).unwrap());
    }

    #[test]
    fn orthogonal_vectors_are_sqrt2_apart() {
        let pair = [rv(&[1.0, 0.0]), rv(&[0.0, 1.0])];
        assert!(!pairwise_aligned(&pair, 1.0).unwrap());
        assert!(pairwise_aligned(&pair, std::f64::consts::SQRT_2 + 1e-12).unwrap());
    }

    #[test]
    fn alignment_preconditions() {
        let y = rv(&[1.0, 0.0]);
        assert!(matches!(
            pairwise_aligned(std::slice::from_ref(&y), 0.1),
            Err(Error::TooFewResults { .. })
        ));
        assert_eq!(
            pairwise_aligned(&[y.clone(), rv(&[0.0, 0.0])], 0.1),
            Err(Error::ZeroNorm(1))
        );
        assert!(matches!(
            pairwise_aligned(&[y, rv(&[1.0])], 0.1),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn mean_examples() {
        assert_eq!(mean_result(&[rv(&[2.0, 4.0])]).unwrap(), rv(&[2.0, 4.0]));
        assert_eq!(
            mean_result(&[rv(&[0.0, 0.0]), rv(&[2.0, 2.0])]).unwrap(),
            rv(&[1.0, 1.0])
        );
        let y = rv(&[1.3, 0.1, -7.77]);
        assert_eq!(mean_result(&vec![y.clone(); 7]).unwrap(), y);
        assert!(mean_result(&[]).is_err());
        assert!(mean_result(&[rv(&[1.0]), rv(&[1.0, 2.0])]).is_err());
    }

    #[test]
    fn fishing_check_examples() {
        let y_bar = rv(&[1.0, 2.0, 2.0]);
        assert!(verify_fishing_result(&y_bar, &y_bar, 0.0).unwrap());
        assert!(!verify_fishing_result(&y_bar.scaled(2.0), &y_bar, 0.5).unwrap());
        assert_eq!(
            verify_fishing_result(&y_bar, &rv(&[0.0, 0.0, 0.0]), 0.1),
            Err(Error::ZeroNorm(0))
        );
    }

    #[test]
    fn fishing_check_boundary_is_inclusive() {
        for y in [&[20.0, 0.0][..], &[3.0, 4.0], &[1.0, 2.0, 2.0], &[0.8, 0.6]] {
            let y_bar = rv(y);
            assert!(verify_fishing_result(&y_bar.scaled(1.05), &y_bar, 0.05).unwrap());
            assert!(!verify_fishing_result(&y_bar.scaled(1.0501), &y_bar, 0.05).unwrap());
        }
    }

    #[test]
    fn zero_margin_accepts_only_exact_copies() {
        let y_bar = rv(&[0.1, 0.7, -3.3]);
        assert!(verify_fishing_result(&y_bar.clone(), &y_bar, 0.0).unwrap());
        let mut nudged = y_bar.values().to_vec();
        nudged[2] = f64::from_bits(nudged[2].to_bits() + 1);
        assert!(!verify_fishing_result(&rv(&nudged), &y_bar, 0.0).unwrap());
    }

    #[test]
    fn witness_validation() {
        let y = rv(&[0.5, 1.5]);
        let tol = Tolerances::default();
        let rec = witness_validate(&task(), &vec![y.clone(); 3], &tol, 3, b"proof", b"key").unwrap();
        assert_eq!(rec.fields.verified_result, y);
        assert_eq!(rec.fields.script_digest, b"script");
        assert!(rec.abstract_matches());

        assert_eq!(
            witness_validate(&task(), &vec![y; 2], &tol, 3, b"p", b"k"),
            Err(Error::TooFewResults {
                required: 3,
                got: 2
            })
        );

        let spread = [rv(&[1.0, 0.0]), rv(&[0.0, 1.0]), rv(&[1.0, 1.0])];
        let tol = Tolerances::new(0.1, 0.1).unwrap();
        assert!(matches!(
            witness_validate(&task(), &spread, &tol, 3, b"p", b"k"),
            Err(Error::ResultsNotMatched { .. })
        ));
    }

    fn appeal_for(provider_result: ResultVector) -> (Appeal, ContractView) {
        let fields = RecordFields {
            script_digest: b"script".to_vec(),
            verified_result: rv(&[1.0, 2.0, 2.0]),
            network_proof: b"proof".to_vec(),
            user_key: b"key".to_vec(),
        };
        let view = ContractView {
            stored_abstract: fields.compute_abstract().unwrap(),
            provider_deposit: 100.0,
            officer_deposit: 5.0,
        };
        let appeal = Appeal {
            provider_result,
            record_fields: fields,
            officer: AccountId(1),
            provider: AccountId(2),
        };
        (appeal, view)
    }

    #[test]
    fn honest_result_is_dismissed() {
        let (appeal, view) = appeal_for(rv(&[1.0, 2.0, 2.0]));
        let j = adjudicate(&appeal, &view, &Tolerances::default()).unwrap();
        assert!(j.abstract_ok);
        assert!(!j.result_faulty);
        assert_eq!(j.outcome, Outcome::Dismiss);
        assert_eq!(j.forfeit, 0.0);
        assert_eq!(j.officer_deposit_spent, 5.0);
    }

    #[test]
    fn doubled_result_forfeits_the_deposit() {
        let (appeal, view) = appeal_for(rv(&[2.0, 4.0, 4.0]));
        let j = adjudicate(&appeal, &view, &Tolerances::new(0.1, 0.1).unwrap()).unwrap();
        assert_eq!(j.outcome, Outcome::RewardOfficer);
        assert_eq!(j.forfeit, 100.0);
        assert!(j.abstract_ok && j.result_faulty);
    }

    #[test]
    fn tampered_key_is_dismissed_whatever_the_result() {
        let (mut appeal, view) = appeal_for(rv(&[9.0, 9.0, 9.0]));
        appeal.record_fields.user_key = b"other".to_vec();
        let j = adjudicate(&appeal, &view, &Tolerances::default()).unwrap();
        assert!(!j.abstract_ok);
        assert_eq!(j.outcome, Outcome::Dismiss);
    }

    #[test]
    fn malformed_appeals_error() {
        let (appeal, mut view) = appeal_for(rv(&[1.0, 2.0]));
        assert!(matches!(
            adjudicate(&appeal, &view, &Tolerances::default()),
            Err(Error::MalformedAppeal(_))
        ));
        let (appeal, _) = appeal_for(rv(&[1.0, 2.0, 2.0]));
        view.officer_deposit = 0.0;
        assert!(matches!(
            adjudicate(&appeal, &view, &Tolerances::default()),
            Err(Error::MalformedAppeal(_))
        ));
    }
}
