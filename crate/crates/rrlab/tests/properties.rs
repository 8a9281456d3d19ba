//! Randomized properties of the coding layer and the exact dyadic
//! arithmetic; these are the invariants everything else silently leans on.

use proptest::prelude::*;
use rrlab::codec::{pair, set_decode, set_encode, tuple_rank, unpair};
use rrlab::instance::{InstanceFile, InstancePayload};
use rrlab::tree::Dyadic;
use std::collections::BTreeSet;

proptest! {
    #[test]
    fn pairing_round_trips(x in 0u64..1_000_000, y in 0u64..1_000_000) {
        let (a, b) = unpair(pair(x, y));
        prop_assert_eq!((a, b), (x, y));
    }

    #[test]
    fn unpairing_round_trips(c in 0u64..1_000_000_000) {
        let (x, y) = unpair(c);
        prop_assert_eq!(pair(x, y), c);
    }

    #[test]
    fn set_codes_round_trip(bits in 0u64..(1 << 20)) {
        let set = set_decode(bits);
        prop_assert_eq!(set_encode(&set).unwrap(), bits);
    }

    #[test]
    fn tuple_rank_orders_colex(mut a in proptest::collection::btree_set(0u64..64, 3),
                               mut b in proptest::collection::btree_set(0u64..64, 3)) {
        let ta: Vec<u64> = std::mem::take(&mut a).into_iter().collect();
        let tb: Vec<u64> = std::mem::take(&mut b).into_iter().collect();
        // Colex order compares in reverse element order.
        let colex = ta.iter().rev().cmp(tb.iter().rev());
        prop_assert_eq!(tuple_rank(&ta).cmp(&tuple_rank(&tb)), colex);
    }

    #[test]
    fn dyadic_addition_matches_floats(a in 0u32..20, b in 0u32..20) {
        let x = Dyadic::pow2_neg(a);
        let y = Dyadic::pow2_neg(b);
        let sum = x.add(y);
        let expected = 0.5f64.powi(a as i32) + 0.5f64.powi(b as i32);
        prop_assert!((sum.to_f64() - expected).abs() < 1e-12);
        prop_assert_eq!(sum.sub(y), x);
    }

    #[test]
    fn dyadic_order_is_total_and_exact(a in 0u128..4096, b in 0u128..4096) {
        let x = Dyadic::new(a, 12);
        let y = Dyadic::new(b, 12);
        prop_assert_eq!(x.lt(y), a < b);
        prop_assert_eq!(x.ge(y), a >= b);
    }

    #[test]
    fn instance_files_round_trip(domain in 2u64..12, seed in 0u64..500) {
        let payloads = [
            InstancePayload::StageColoring(rrlab::generate::gen_coloring(
                rrlab::generate::ColoringClass::Mixed, domain, 1, seed)),
            InstancePayload::Tournament(rrlab::generate::gen_tournament(domain, seed)),
            InstancePayload::LimitFunction(rrlab::generate::gen_two_bounded_limit(
                domain, domain, domain / 2, seed)),
            InstancePayload::Tree(rrlab::generate::gen_random_tree(8, 0.2, seed)),
        ];
        for p in payloads {
            let file = InstanceFile::new(p, "round_trip", Some(seed));
            let back = InstanceFile::from_json(&file.to_json().unwrap()).unwrap();
            prop_assert_eq!(back, file);
        }
    }
}

#[test]
fn set_codes_are_bit_positions() {
    let set: BTreeSet<u64> = [0, 3, 5].into_iter().collect();
    assert_eq!(set_encode(&set).unwrap(), 0b101001);
}
