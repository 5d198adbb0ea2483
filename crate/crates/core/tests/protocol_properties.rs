use entrapnet_core::domain::{AccountId, Behavior, ProviderAccount, ResultVector};
use entrapnet_core::record::{canonical_serialize, compute_abstract, RecordFields};
use entrapnet_core::verification::{
    adjudicate, pairwise_aligned, verify_fishing_result, Appeal, ContractView, Outcome, Tolerances,
};
use proptest::prelude::*;

fn reals(dim: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e6f64..1e6, dim)
}

fn nonzero(dim: usize) -> impl Strategy<Value = ResultVector> {
    prop::collection::vec(-100.0f64..100.0, dim)
        .prop_filter("zero norm", |v| v.iter().any(|x| x.abs() > 1e-3))
        .prop_map(|v| ResultVector::new(v).unwrap())
}

fn fields() -> impl Strategy<Value = RecordFields> {
    (
        prop::collection::vec(any::<u8>(), 0..12),
        reals(1..4),
        prop::collection::vec(any::<u8>(), 0..12),
        prop::collection::vec(any::<u8>(), 0..12),
    )
        .prop_map(|(script_digest, r, network_proof, user_key)| RecordFields {
            script_digest,
            verified_result: ResultVector::new(r).unwrap(),
            network_proof,
            user_key,
        })
}

proptest! {
    #[test]
    fn distinct_tuples_never_share_bytes(a in fields(), b in fields()) {
        let (ea, eb) = (canonical_serialize(&a).unwrap(), canonical_serialize(&b).unwrap());
        // bitwise comparison: -0.0 and 0.0 are different inputs
        let same_bits = a.script_digest == b.script_digest
            && a.network_proof == b.network_proof
            && a.user_key == b.user_key
            && a.verified_result.values().iter().map(|x| x.to_bits()).eq(b.verified_result.values().iter().map(|x| x.to_bits()));
        prop_assert_eq!(same_bits, ea == eb);
    }

    #[test]
    fn moving_bytes_between_fields_changes_the_encoding(
        head in prop::collection::vec(any::<u8>(), 1..8),
        tail in prop::collection::vec(any::<u8>(), 0..8),
    ) {
        let r = ResultVector::new(vec![1.0]).unwrap();
        let joined = [head.clone(), tail.clone()].concat();
        let a = RecordFields { script_digest: joined, verified_result: r.clone(), network_proof: vec![], user_key: vec![] };
        let b = RecordFields { script_digest: tail, verified_result: r, network_proof: head, user_key: vec![] };
        prop_assert_ne!(canonical_serialize(&a).unwrap(), canonical_serialize(&b).unwrap());
    }

    #[test]
    fn abstract_is_deterministic(a in fields()) {
        prop_assert_eq!(compute_abstract(&a).unwrap(), compute_abstract(&a.clone()).unwrap());
    }

    #[test]
    fn forfeit_never_leaves_a_negative_deposit(deposit in 0.0f64..1e9) {
        let mut p = ProviderAccount::new(AccountId(1), deposit, Behavior::Honest).unwrap();
        prop_assert_eq!(p.forfeit(), deposit);
        prop_assert_eq!(p.deposit(), 0.0);
        prop_assert_eq!(p.forfeit(), 0.0);
    }

    #[test]
    fn alignment_is_symmetric(a in nonzero(3), b in nonzero(3), delta in 0.0f64..2.0) {
        prop_assert_eq!(
            pairwise_aligned(&[a.clone(), b.clone()], delta).unwrap(),
            pairwise_aligned(&[b, a], delta).unwrap()
        );
    }

    #[test]
    fn alignment_ignores_positive_scaling(a in nonzero(3), b in nonzero(3), k in 1e-3f64..1e3, delta in 0.0f64..2.0) {
        let d = a.distance(&b).unwrap();
        // away from the boundary, where rescaling may move the last bits
        prop_assume!((d - delta).abs() > 1e-9);
        prop_assert_eq!(
            pairwise_aligned(&[a.clone(), b.clone()], delta).unwrap(),
            pairwise_aligned(&[a.scaled(k), b], delta).unwrap()
        );
    }

    #[test]
    fn verification_ignores_joint_scaling(yf in nonzero(4), ybar in nonzero(4), k in 1e-3f64..1e3, delta in 0.0f64..2.0) {
        let ratio = yf.values().iter().zip(ybar.values()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() / ybar.norm();
        prop_assume!((ratio - delta).abs() > 1e-9 * (1.0 + ratio));
        prop_assert_eq!(
            verify_fishing_result(&yf, &ybar, delta).unwrap(),
            verify_fishing_result(&yf.scaled(k), &ybar.scaled(k), delta).unwrap()
        );
    }

    #[test]
    fn tampered_record_never_pays(f in fields(), which in 0usize..4, byte in any::<u8>()) {
        let stored = compute_abstract(&f).unwrap();
        let mut bad = f.clone();
        match which {
            0 => bad.script_digest.push(byte),
            1 => {
                let mut v = bad.verified_result.values().to_vec();
                v[0] = if v[0] == 0.0 { 1.0 } else { v[0] * 2.0 };
                bad.verified_result = ResultVector::new(v).unwrap();
            }
            2 => bad.network_proof.push(byte),
            _ => bad.user_key.push(byte),
        }
        prop_assume!(bad.verified_result.norm() > 0.0);
        let far: Vec<f64> = bad.verified_result.values().iter().map(|x| x + 1e3).collect();
        let appeal = Appeal {
            provider_result: ResultVector::new(far).unwrap(),
            record_fields: bad,
            officer: AccountId(9),
            provider: AccountId(1),
        };
        let view = ContractView { stored_abstract: stored, provider_deposit: 100.0, officer_deposit: 5.0 };
        let j = adjudicate(&appeal, &view, &Tolerances::default()).unwrap();
        prop_assert!(!j.abstract_ok);
        prop_assert_eq!(j.outcome, Outcome::Dismiss);
        prop_assert_eq!(j.forfeit, 0.0);
    }

    #[test]
    fn zero_margin_accepts_only_exact_copies(y in nonzero(5), i in 0usize..5) {
        prop_assert!(verify_fishing_result(&y, &y.clone(), 0.0).unwrap());
        let mut v = y.values().to_vec();
        v[i] = f64::from_bits(v[i].to_bits() + 1);
        let nudged = ResultVector::new(v).unwrap();
        prop_assert!(!verify_fishing_result(&nudged, &y, 0.0).unwrap());
    }
}
