use std::collections::VecDeque;

use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::SimConfig;
use super::ledger::{check_conservation, IncentivePool, LedgerEntry, Payout};
use super::scheduler::assign_uniform;
use crate::domain::{AccountId, Behavior, OfficerAccount, ProviderAccount, ResultVector, Task, TaskId, TaskKind};
use crate::error::Result;
use crate::record::RecordId;
use crate::stochastic::{batch_rng, fishing_share, RunningStats, SlotSampler};
use crate::verification::{adjudicate, verify_fishing_result, witness_validate, Appeal, ContractView, Outcome};

// independent ChaCha streams under the run seed
const STREAM_ARRIVALS: u64 = 0;
const STREAM_SCHEDULER: u64 = 1;
const STREAM_RECORDS: u64 = 2;
const STREAM_SETUP: u64 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub slots: u64,
    pub seed: u64,
    /// Mean over slots of the fraction of that slot's assignments that were
    /// fishing tasks. Equals the assignment-weighted average of the
    /// per-provider fractions.
    pub empirical_p: f64,
    pub empirical_p_std_error: f64,
    pub catches_total: u64,
    pub false_accusations: u64,
    pub dismissed_appeals: u64,
    pub pool_trajectory: Vec<f64>,
    pub total_forfeited: f64,
    pub total_rewarded: f64,
    /// Rewards owed but not paid because the pool ran short.
    pub unpaid_rewards: f64,
    pub conservation_satisfied: bool,
    pub per_provider_assignment_counts: Vec<u64>,
    pub fishing_tasks: u64,
    /// Fishing tasks executed by a faulty provider that was still active.
    pub fishing_to_faulty: u64,
    /// Fishing tasks that reached a provider already deactivated earlier in
    /// the same slot.
    pub voided_fishing: u64,
    /// Imposed tasks per witness, in witness order.
    pub imposed_by_witness: Vec<u64>,
    pub idle_slots: u64,
    pub records_generated: u64,
    pub records_consumed: u64,
    pub faulty_providers: usize,
    pub active_providers_end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FishingAssignment {
    pub slot: u64,
    pub task: TaskId,
    pub officer: AccountId,
    pub record: RecordId,
    pub provider: AccountId,
    pub voided: bool,
    pub caught: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Consumption {
    pub slot: u64,
    pub officer: AccountId,
    pub record: RecordId,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub slot: u64,
    pub balance: f64,
    pub catches: u64,
    pub empirical_p: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SimTrace {
    pub ledger: Vec<LedgerEntry>,
    pub payouts: Vec<Payout>,
    pub fishing: Vec<FishingAssignment>,
    pub consumed: Vec<Consumption>,
    pub trajectory: Vec<TrajectoryPoint>,
}

pub fn run(config: &SimConfig) -> Result<SimReport> {
    run_with_trace(config).map(|(report, _)| report)
}

pub fn run_with_trace(config: &SimConfig) -> Result<(SimReport, SimTrace)> {
    config.validate()?;
    let mut sim = Sim::new(config)?;
    for slot in 0..config.slots {
        sim.step(slot)?;
    }
    Ok(sim.finish())
}

struct Sim<'a> {
    cfg: &'a SimConfig,
    sampler: SlotSampler,
    arrivals: ChaCha8Rng,
    scheduler: ChaCha8Rng,
    records: ChaCha8Rng,
    providers: Vec<ProviderAccount>,
    officers: Vec<OfficerAccount>,
    witnesses: Vec<AccountId>,
    pool: IncentivePool,
    next_task: u64,
    shares: RunningStats,
    window: VecDeque<f64>,
    counts: Vec<u64>,
    report: SimReport,
    trace: SimTrace,
}

impl<'a> Sim<'a> {
    fn new(cfg: &'a SimConfig) -> Result<Self> {
        let mut setup = batch_rng(cfg.seed, STREAM_SETUP);
        let faulty_count = cfg.faulty_count();
        let mut faulty = vec![false; cfg.providers];
        for i in index::sample(&mut setup, cfg.providers, faulty_count) {
            faulty[i] = true;
        }
        let providers = faulty
            .iter()
            .enumerate()
            .map(|(i, &bad)| {
                let behavior = if bad {
                    Behavior::faulty(cfg.corruption)?
                } else {
                    Behavior::Honest
                };
                ProviderAccount::new(AccountId(i as u32), cfg.deposit, behavior)
            })
            .collect::<Result<Vec<_>>>()?;

        let first_officer = cfg.providers as u32;
        let officers = (0..cfg.officers as u32)
            .map(|k| OfficerAccount::new(AccountId(first_officer + k), cfg.officer_deposit, cfg.deposit))
            .collect::<Result<Vec<_>>>()?;
        let first_witness = first_officer + cfg.officers as u32;
        let witnesses = (0..cfg.witnesses as u32).map(|k| AccountId(first_witness + k)).collect();

        let mut sim = Self {
            cfg,
            sampler: SlotSampler::new(&cfg.arrival)?,
            arrivals: batch_rng(cfg.seed, STREAM_ARRIVALS),
            scheduler: batch_rng(cfg.seed, STREAM_SCHEDULER),
            records: batch_rng(cfg.seed, STREAM_RECORDS),
            providers,
            officers,
            witnesses,
            pool: IncentivePool::new(cfg.initial_pool),
            next_task: 0,
            shares: RunningStats::default(),
            window: VecDeque::with_capacity(cfg.reward_window),
            counts: vec![0; cfg.providers],
            report: SimReport {
                slots: cfg.slots,
                seed: cfg.seed,
                empirical_p: 0.0,
                empirical_p_std_error: 0.0,
                catches_total: 0,
                false_accusations: 0,
                dismissed_appeals: 0,
                pool_trajectory: Vec::with_capacity(cfg.slots as usize),
                total_forfeited: 0.0,
                total_rewarded: 0.0,
                unpaid_rewards: 0.0,
                conservation_satisfied: false,
                per_provider_assignment_counts: Vec::new(),
                fishing_tasks: 0,
                fishing_to_faulty: 0,
                voided_fishing: 0,
                imposed_by_witness: vec![0; cfg.witnesses],
                idle_slots: 0,
                records_generated: 0,
                records_consumed: 0,
                faulty_providers: faulty_count,
                active_providers_end: 0,
            },
            trace: SimTrace::default(),
        };
        for officer in 0..sim.officers.len() {
            for _ in 0..cfg.repository_size {
                sim.generate_record(officer, 0)?;
            }
        }
        Ok(sim)
    }

    fn task_id(&mut self) -> TaskId {
        self.next_task += 1;
        TaskId(self.next_task - 1)
    }

    /// Phase 1: witnesses agree on a synthetic task's result and the officer
    /// files it as a fishing record.
    fn generate_record(&mut self, officer: usize, slot: u64) -> Result<RecordId> {
        let dim = self.cfg.task_dimension;
        let mut values: Vec<f64> = (0..dim).map(|_| self.records.random_range(-1.0..1.0)).collect();
        // keep the norm away from zero
        values[0] = 1.0 + self.records.random::<f64>();
        let truth = ResultVector::new(values)?;
        let digest: [u8; 32] = self.records.random();
        let owner = self.officers[officer].id;
        let task = Task {
            id: self.task_id(),
            kind: TaskKind::Fishing,
            script_digest: digest.to_vec(),
            submitter: owner,
            slot,
        };
        let proof: Vec<u8> = self.witnesses.iter().flat_map(|w| w.0.to_be_bytes()).collect();
        let record = witness_validate(
            &task,
            &vec![truth; self.cfg.witnesses],
            &self.cfg.tolerances,
            self.cfg.witnesses,
            &proof,
            &owner.0.to_be_bytes(),
        )?;
        self.report.records_generated += 1;
        self.officers[officer].repository.insert(record)
    }

    /// An available record of `officer` not yet sent out this slot,
    /// generated on demand if the repository runs dry.
    fn pick_record(&mut self, officer: usize, used: &[RecordId], slot: u64) -> Result<RecordId> {
        let free = self.officers[officer].repository.ids().find(|id| !used.contains(id));
        match free {
            Some(id) => Ok(id),
            None => self.generate_record(officer, slot),
        }
    }

    fn step(&mut self, slot: u64) -> Result<()> {
        self.pool.open_slot(slot);
        let (x, y) = self.sampler.sample(&mut self.arrivals);
        // the imposed task, submitted by witnesses in turn
        self.report.imposed_by_witness[(slot % self.witnesses.len() as u64) as usize] += 1;
        self.report.fishing_tasks += x;

        let active: Vec<AccountId> = self
            .providers
            .iter()
            .filter(|p| p.is_active())
            .map(|p| p.id)
            .collect();
        if active.is_empty() {
            self.report.idle_slots += 1;
            self.close_slot(slot);
            return Ok(());
        }

        let assignment = assign_uniform((x + y + 1) as usize, &active, &mut self.scheduler)?;
        for p in &assignment {
            self.counts[p.0 as usize] += 1;
        }
        let share = fishing_share(x, y);
        self.shares.push(share);
        if self.window.len() == self.cfg.reward_window {
            self.window.pop_front();
        }
        self.window.push_back(share);
        let p_window = self.window.iter().sum::<f64>() / self.window.len() as f64;

        let mut used: Vec<Vec<RecordId>> = vec![Vec::new(); self.officers.len()];
        for &provider in &assignment[..x as usize] {
            let task = self.task_id();
            let officer = self.scheduler.random_range(0..self.officers.len());
            let record = self.pick_record(officer, &used[officer], slot)?;
            used[officer].push(record);
            let caught = self.deliver(slot, officer, record, provider, p_window)?;
            let voided = caught.is_none();
            self.trace.fishing.push(FishingAssignment {
                slot,
                task,
                officer: self.officers[officer].id,
                record,
                provider,
                voided,
                caught: caught.unwrap_or(false),
            });
        }
        self.close_slot(slot);
        Ok(())
    }

    /// Phase 2 for one fishing task: execution, the officer's check and, on
    /// failure, the appeal. `None` if the provider was already gone.
    fn deliver(
        &mut self,
        slot: u64,
        officer: usize,
        record_id: RecordId,
        provider: AccountId,
        p_window: f64,
    ) -> Result<Option<bool>> {
        let pi = provider.0 as usize;
        if !self.providers[pi].is_active() {
            self.report.voided_fishing += 1;
            return Ok(None);
        }
        let behavior = self.providers[pi].behavior;
        if behavior.is_faulty() {
            self.report.fishing_to_faulty += 1;
        }
        let record = self.officers[officer]
            .repository
            .get(record_id)
            .expect("picked record is available");
        let truth = &record.fields.verified_result;
        let result = behavior.execute(truth);
        if verify_fishing_result(&result, truth, self.cfg.tolerances.delta_ver)? {
            return Ok(Some(false));
        }

        let appeal = Appeal {
            provider_result: result,
            record_fields: record.fields.clone(),
            officer: self.officers[officer].id,
            provider,
        };
        let view = ContractView {
            stored_abstract: record.abstract_digest,
            provider_deposit: self.providers[pi].deposit(),
            officer_deposit: self.officers[officer].officer_deposit(),
        };
        let judgement = adjudicate(&appeal, &view, &self.cfg.tolerances)?;
        match judgement.outcome {
            Outcome::Dismiss => {
                self.report.dismissed_appeals += 1;
                Ok(Some(false))
            }
            Outcome::RewardOfficer => {
                let forfeited = self.providers[pi].forfeit();
                self.pool.settle_catch(forfeited, self.cfg.reward.reward(p_window));
                self.report.catches_total += 1;
                if !behavior.is_faulty() {
                    self.report.false_accusations += 1;
                }
                self.officers[officer].repository.remove_consumed(record_id)?;
                self.report.records_consumed += 1;
                self.trace.consumed.push(Consumption {
                    slot,
                    officer: self.officers[officer].id,
                    record: record_id,
                });
                self.generate_record(officer, slot)?;
                Ok(Some(true))
            }
        }
    }

    fn close_slot(&mut self, slot: u64) {
        let entry = self.pool.close_slot();
        self.report.pool_trajectory.push(entry.balance_after);
        self.trace.trajectory.push(TrajectoryPoint {
            slot,
            balance: entry.balance_after,
            catches: entry.catches,
            empirical_p: self.shares.mean(),
        });
    }

    fn finish(mut self) -> (SimReport, SimTrace) {
        let (ledger, payouts) = std::mem::take(&mut self.pool).into_parts();
        let r = &mut self.report;
        r.empirical_p = self.shares.mean().clamp(0.0, 1.0);
        r.empirical_p_std_error = self.shares.std_error();
        r.total_forfeited = ledger.iter().map(|e| e.forfeited).sum();
        r.total_rewarded = ledger.iter().map(|e| e.rewarded).sum();
        r.unpaid_rewards = payouts.iter().map(|p| p.owed - p.paid).sum();
        r.conservation_satisfied = check_conservation(&ledger);
        r.per_provider_assignment_counts = self.counts;
        r.active_providers_end = self.providers.iter().filter(|p| p.is_active()).count();
        self.trace.ledger = ledger;
        self.trace.payouts = payouts;
        (self.report, self.trace)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::ArrivalModel;

    fn small(slots: u64, malicious_fraction: f64) -> SimConfig {
        SimConfig {
            arrival: ArrivalModel {
                lambda_x: 2.0,
                lambda_y: 50.0,
            },
            providers: 10,
            malicious_fraction,
            repository_size: 2,
            ..SimConfig::reference(slots, 11)
        }
    }

    #[test]
    fn honest_network_keeps_pool_flat() {
        let r = run(&SimConfig {
            initial_pool: 7.0,
            ..small(300, 0.0)
        })
        .unwrap();
        assert_eq!(r.catches_total, 0);
        assert!(r.pool_trajectory.iter().all(|&b| b == 7.0));
        assert!(!r.conservation_satisfied);
        assert_eq!(r.active_providers_end, 10);
    }

    #[test]
    fn no_fishing_means_no_entrapment() {
        let cfg = SimConfig {
            arrival: ArrivalModel {
                lambda_x: 0.0,
                lambda_y: 50.0,
            },
            ..small(200, 0.5)
        };
        let (r, t) = run_with_trace(&cfg).unwrap();
        assert_eq!(r.empirical_p, 0.0);
        assert_eq!(r.catches_total, 0);
        assert!(t.fishing.is_empty());
        assert_eq!(r.records_generated, 2 * 4);
    }

    #[test]
    fn every_faulty_provider_is_caught_and_paid_for() {
        let (r, t) = run_with_trace(&small(300, 0.3)).unwrap();
        assert_eq!(r.faulty_providers, 3);
        assert_eq!(r.catches_total, 3);
        assert_eq!(r.catches_total, r.fishing_to_faulty);
        assert_eq!(r.false_accusations, 0);
        assert_eq!(r.active_providers_end, 7);
        assert_eq!(t.consumed.len(), 3);
        assert_eq!(r.total_forfeited, 300.0);
        assert!(r.conservation_satisfied);
        assert_eq!(t.ledger.len(), 300);
        assert_eq!(r.imposed_by_witness, vec![100, 100, 100]);
        assert_eq!(t.fishing.len() as u64, r.fishing_tasks);
    }

    #[test]
    fn identical_config_identical_run() {
        let cfg = small(200, 0.3);
        assert_eq!(run(&cfg).unwrap(), run(&cfg).unwrap());
        let other = run(&SimConfig { seed: 12, ..cfg }).unwrap();
        assert_ne!(other.per_provider_assignment_counts, run(&cfg).unwrap().per_provider_assignment_counts);
    }

    #[test]
    fn reward_above_deposit_breaks_conservation() {
        let cfg = SimConfig {
            deposit: 10.0,
            officer_deposit: 1.0,
            ..small(50, 1.0)
        };
        let r = run(&cfg).unwrap();
        assert!(r.catches_total > 0);
        assert!(!r.conservation_satisfied);
        assert!(r.unpaid_rewards > 0.0);
        assert!(r.pool_trajectory.iter().all(|&b| b >= 0.0));
    }

    #[test]
    fn all_faulty_network_goes_idle() {
        let r = run(&small(100, 1.0)).unwrap();
        assert_eq!(r.active_providers_end, 0);
        assert_eq!(r.catches_total, 10);
        assert!(r.idle_slots > 0);
    }
}
