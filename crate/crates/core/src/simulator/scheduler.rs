use rand::Rng;

use crate::domain::AccountId;
use crate::error::{Error, Result};

/// Maps task `i` to `out[i]`, each drawn independently and uniformly from
/// `providers`. Capacity is unbounded: one provider may get many tasks.
pub fn assign_uniform<R: Rng + ?Sized>(
    task_count: usize,
    providers: &[AccountId],
    rng: &mut R,
) -> Result<Vec<AccountId>> {
    if providers.is_empty() {
        return Err(Error::NoActiveProviders);
    }
    Ok((0..task_count)
        .map(|_| providers[rng.random_range(0..providers.len())])
        .collect())
}

/// Pearson statistic of `counts` against equal expected counts.
pub fn chi_square_statistic(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    if counts.is_empty() || total == 0 {
        return 0.0;
    }
    let expected = total as f64 / counts.len() as f64;
    counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::batch_rng;

    fn ids(n: u32) -> Vec<AccountId> {
        (0..n).map(AccountId).collect()
    }

    #[test]
    fn single_provider_takes_everything() {
        let a = assign_uniform(50, &ids(1), &mut batch_rng(0, 0)).unwrap();
        assert!(a.iter().all(|&p| p == AccountId(0)));
    }

    #[test]
    fn empty_pool_is_an_error() {
        assert!(matches!(
            assign_uniform(3, &[], &mut batch_rng(0, 0)),
            Err(Error::NoActiveProviders)
        ));
        assert!(assign_uniform(0, &ids(2), &mut batch_rng(0, 0)).unwrap().is_empty());
    }

    #[test]
    fn same_stream_same_assignment() {
        let a = assign_uniform(1000, &ids(7), &mut batch_rng(9, 3)).unwrap();
        let b = assign_uniform(1000, &ids(7), &mut batch_rng(9, 3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn statistic_of_flat_counts_is_zero() {
        assert_eq!(chi_square_statistic(&[5, 5, 5]), 0.0);
        assert_eq!(chi_square_statistic(&[]), 0.0);
        assert!((chi_square_statistic(&[10, 0]) - 10.0).abs() < 1e-12);
    }
}
