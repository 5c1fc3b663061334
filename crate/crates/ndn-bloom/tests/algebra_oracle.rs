//! Algebra checks against an exact-set oracle, plus the empirical false
//! positive rate at the design point.

use std::collections::BTreeSet;

use ndn_bloom::{AggregateDecision, BfParams, BloomFilter, DEFAULT_SEED};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn design_params() -> BfParams {
    BfParams::for_design(1000, 0.0638, DEFAULT_SEED).unwrap()
}

fn filter_of(names: &BTreeSet<String>) -> BloomFilter {
    let mut bf = BloomFilter::new(design_params());
    for n in names {
        bf.insert(n);
    }
    bf
}

fn name_set() -> impl Strategy<Value = BTreeSet<String>> {
    // Small sets over a small pool so subset/equality cases actually occur.
    prop::collection::btree_set("/p[0-9]/n[0-9]", 0..8)
}

proptest! {
    #[test]
    fn no_false_negatives(names in name_set()) {
        let bf = filter_of(&names);
        for n in &names {
            prop_assert!(bf.contains(n));
        }
    }

    #[test]
    fn union_never_loses_a_member(a in name_set(), b in name_set()) {
        let fa = filter_of(&a);
        let fb = filter_of(&b);
        let u = fa.union(&fb).unwrap();
        for n in a.union(&b) {
            prop_assert!(u.contains(n));
        }
        // Bitwise OR is commutative and idempotent at the bit level.
        let vu = fb.union(&fa).unwrap();
        prop_assert_eq!(u.bit_vector(), vu.bit_vector());
        let uu = u.union(&u).unwrap();
        prop_assert_eq!(uu.bit_vector(), u.bit_vector());
    }

    #[test]
    fn subset_and_identity_agree_with_set_oracle(a in name_set(), b in name_set()) {
        let fa = filter_of(&a);
        let fb = filter_of(&b);
        // Set equality always shows up as bit identity, and differing bits
        // prove differing sets. (Identical bits for different sets would be
        // a hash collision, which the filter is allowed to miss.)
        if a == b {
            prop_assert!(fa.is_identical(&fb).unwrap());
        }
        if !fa.is_identical(&fb).unwrap() {
            prop_assert!(a != b);
        }
        // One-sided subset error only: set inclusion forces a bit-level
        // subset; a bit-level non-subset proves set non-inclusion.
        if a.is_subset(&b) {
            prop_assert!(fa.is_subset(&fb).unwrap());
        }
        if !fa.is_subset(&fb).unwrap() {
            prop_assert!(!a.is_subset(&b));
        }
    }

    #[test]
    fn may_aggregate_matches_oracle_on_collision_free_pairs(a in name_set(), b in name_set()) {
        let fa = filter_of(&a);
        let fb = filter_of(&b);
        let decision = fa.may_aggregate(&fb).unwrap();
        // With collision-free bit patterns the decision mirrors the sets.
        let bits_eq = fa.is_identical(&fb).unwrap();
        let collision_free = (bits_eq == (a == b))
            && (fa.is_subset(&fb).unwrap() == a.is_subset(&b))
            && (fb.is_subset(&fa).unwrap() == b.is_subset(&a));
        if collision_free {
            match decision {
                AggregateDecision::Identical => prop_assert!(a == b),
                AggregateDecision::UseB => prop_assert!(a.is_subset(&b) && a != b),
                AggregateDecision::UseA => prop_assert!(b.is_subset(&a) && !a.is_subset(&b)),
                AggregateDecision::Union | AggregateDecision::Refuse => {
                    prop_assert!(!a.is_subset(&b) && !b.is_subset(&a));
                }
            }
        }
    }

    #[test]
    fn determinism_same_set_same_bits(names in name_set()) {
        let one = filter_of(&names);
        let two = filter_of(&names);
        prop_assert_eq!(one.bit_vector(), two.bit_vector());
    }
}

#[test]
fn empirical_fpp_at_design_point() {
    let mut bf = BloomFilter::new(design_params());
    for i in 0..1000 {
        bf.insert(format!("/site{}/dir{}/file{}", i / 100, (i / 10) % 10, i % 10));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let probes = 1_000_000u32;
    let mut hits = 0u32;
    for _ in 0..probes {
        // Absent keys: a namespace disjoint from the inserted one.
        let key = format!("/absent/{}", rng.gen::<u64>());
        if bf.contains(key) {
            hits += 1;
        }
    }
    let fpp = f64::from(hits) / f64::from(probes);
    assert!(
        (fpp - 0.0638).abs() <= 0.01,
        "measured fpp {fpp} outside 0.0638 +/- 0.01"
    );
}
