use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub slot: u64,
    pub forfeited: f64,
    pub rewarded: f64,
    pub catches: u64,
    pub balance_after: f64,
}

/// `sum(forfeited) - sum(rewarded) > 0`. Strict, so an empty run fails.
pub fn check_conservation(ledger: &[LedgerEntry]) -> bool {
    let (lost, paid) = ledger
        .iter()
        .fold((0.0, 0.0), |(l, g), e| (l + e.forfeited, g + e.rewarded));
    lost - paid > 0.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Payout {
    pub slot: u64,
    pub owed: f64,
    pub paid: f64,
    pub balance_before: f64,
}

/// Incentive pool. Forfeits go in; rewards come out, never more than the
/// balance holds.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IncentivePool {
    balance: f64,
    slot: Option<LedgerEntry>,
    entries: Vec<LedgerEntry>,
    payouts: Vec<Payout>,
    unpaid: f64,
}

impl IncentivePool {
    pub fn new(initial: f64) -> Self {
        Self {
            balance: initial,
            ..Self::default()
        }
    }

    pub fn balance(&self) -> f64 {
        self.balance
    }

    pub fn open_slot(&mut self, slot: u64) {
        debug_assert!(self.slot.is_none());
        self.slot = Some(LedgerEntry {
            slot,
            forfeited: 0.0,
            rewarded: 0.0,
            catches: 0,
            balance_after: self.balance,
        });
    }

    /// Books one catch: the forfeited deposit enters, then the reward leaves.
    /// Returns the amount actually paid.
    pub fn settle_catch(&mut self, forfeited: f64, reward: f64) -> f64 {
        let entry = self.slot.as_mut().expect("settle outside a slot");
        self.balance += forfeited;
        let before = self.balance;
        let paid = reward.clamp(0.0, before);
        self.balance -= paid;
        self.unpaid += reward - paid;
        entry.forfeited += forfeited;
        entry.rewarded += paid;
        entry.catches += 1;
        self.payouts.push(Payout {
            slot: entry.slot,
            owed: reward,
            paid,
            balance_before: before,
        });
        paid
    }

    pub fn close_slot(&mut self) -> LedgerEntry {
        let mut entry = self.slot.take().expect("no open slot");
        entry.balance_after = self.balance;
        self.entries.push(entry);
        entry
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    pub fn payouts(&self) -> &[Payout] {
        &self.payouts
    }

    pub fn unpaid(&self) -> f64 {
        self.unpaid
    }

    pub(crate) fn into_parts(self) -> (Vec<LedgerEntry>, Vec<Payout>) {
        (self.entries, self.payouts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(forfeited: f64, rewarded: f64) -> LedgerEntry {
        LedgerEntry {
            slot: 0,
            forfeited,
            rewarded,
            catches: 1,
            balance_after: 0.0,
        }
    }

    #[test]
    fn conservation_examples() {
        assert!(!check_conservation(&[]));
        assert!(check_conservation(&[entry(100.0, 15.31)]));
        assert!(!check_conservation(&[entry(10.0, 10.0)]));
    }

    #[test]
    fn payout_is_capped_at_balance() {
        let mut pool = IncentivePool::new(0.0);
        pool.open_slot(0);
        assert_eq!(pool.settle_catch(10.0, 15.0), 10.0);
        assert_eq!(pool.balance(), 0.0);
        assert_eq!(pool.unpaid(), 5.0);
        let e = pool.close_slot();
        assert_eq!((e.forfeited, e.rewarded, e.catches, e.balance_after), (10.0, 10.0, 1, 0.0));
        assert_eq!(pool.payouts()[0].balance_before, 10.0);
    }

    #[test]
    fn quiet_slot_keeps_balance() {
        let mut pool = IncentivePool::new(3.0);
        pool.open_slot(4);
        let e = pool.close_slot();
        assert_eq!(e.balance_after, 3.0);
        assert_eq!(e.catches, 0);
    }
}
