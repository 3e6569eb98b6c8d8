mod common;

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use mrip::circuits::{BlockCodec, Circuit};
use mrip::engine::{
    answer_bit, expected_utility_with, run_protocol, BitWriter, Bits, Evaluation, FnProfile, Profile, Protocol,
};
use mrip::oracle3sat::{count_satisfying, OracleTable, Oracle3SatInstance};
use mrip::protocols::{
    complement_wrap, make_fig_scoring, make_fig_simple, two_five_wrap, CommittedOracleProfile, ComplementProfile,
    MipVariant, SimpleProfile,
};
use mrip::scoring::{expected_protocol_score, BinaryDistribution};
use mrip::{gen, Rational, Scalar};
use num_traits::One;
use proptest::prelude::*;

fn instance(max_bits: u32) -> impl Strategy<Value = Oracle3SatInstance> {
    (0..=2u32, 1..=2u32)
        .prop_filter("fits", move |(r, s)| r + 3 * s <= max_bits)
        .prop_flat_map(|(r, s)| {
            let vars = (r + 3 * s + 3) as i32;
            let lit = (1..=vars, any::<bool>()).prop_map(|(v, neg)| if neg { -v } else { v });
            let clause = [lit.clone(), lit.clone(), lit];
            prop::collection::vec(clause, 0..6)
                .prop_map(move |clauses| Oracle3SatInstance::new(r, s, clauses).unwrap())
        })
}

/// A strategy that answers every transcript with pseudo-random bits.
fn garbage(seed: u64) -> FnProfile<impl Fn(usize, &[Bits]) -> Option<Bits> + Send + Sync> {
    FnProfile::new(format!("garbage {seed}"), move |prover, tr: &[Bits]| {
        let mut h = DefaultHasher::new();
        (seed, prover, tr).hash(&mut h);
        let x = h.finish();
        let len = (x % 13) as u32;
        Some(Bits::from_u64((x >> 8) & ((1 << len) - 1), len))
    })
}

fn in_unit_range(u: &Rational) -> bool {
    *u >= -Rational::one() && *u <= Rational::one()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn bit_fields_round_trip(fields in prop::collection::vec((any::<u64>(), 0..=64u32), 0..8)) {
        let fields: Vec<(u64, u32)> = fields
            .into_iter()
            .map(|(v, w)| (if w == 64 { v } else { v & ((1u64 << w) - 1) }, w))
            .collect();
        let mut writer = BitWriter::new();
        for &(v, w) in &fields {
            writer.push_u64(v, w);
        }
        let bits = writer.finish();
        let mut reader = bits.reader();
        for &(v, w) in &fields {
            prop_assert_eq!(reader.u64(w), Some(v));
        }
        prop_assert!(reader.is_done());
    }

    #[test]
    fn instance_json_round_trips(inst in instance(6)) {
        let back = Oracle3SatInstance::from_json_str(&inst.to_json_string()).unwrap();
        prop_assert_eq!(back, inst);
    }

    #[test]
    fn block_codec_round_trips(seed in any::<u64>(), r in 0..=1u32, clauses in 0..=3usize) {
        let codec = BlockCodec::default();
        let inst = gen::gen_instance(r, 1, clauses, &mut gen::rng(seed)).unwrap();
        let bits = codec.encode(&inst).unwrap();
        prop_assert_eq!(bits.len(), codec.width());
        prop_assert_eq!(codec.decode(&bits).unwrap(), inst);
    }

    #[test]
    fn circuit_json_round_trips(seed in any::<u64>(), n in 1..=4usize, extra in 1..=10usize) {
        let c = gen::gen_circuit(n, n + extra, &mut gen::rng(seed)).unwrap();
        let back = Circuit::from_json_str(&c.to_json_string()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn counting_matches_reference(inst in instance(6), mask in any::<u16>()) {
        let width = inst.s();
        let mask = u64::from(mask) & ((1u64 << (1 << width)) - 1);
        let table: Vec<bool> = (0..1usize << width).map(|b| mask >> b & 1 == 1).collect();
        let oracle = OracleTable::new(width, table).unwrap();
        prop_assert_eq!(count_satisfying(&inst, &oracle), common::brute_count(&inst, mask));
    }

    #[test]
    fn scoring_payments_stay_in_range(inst in instance(6), seed in any::<u64>(), coin in any::<u64>()) {
        let proto = make_fig_scoring(inst);
        let coins: Vec<u64> = Protocol::<Rational>::coin_radices(&proto)
            .iter()
            .scan(coin, |c, &radix| {
                let v = *c % radix;
                *c /= radix;
                Some(v)
            })
            .collect();
        let out = run_protocol::<Rational, _>(&proto, &coins, &garbage(seed)).unwrap();
        prop_assert!(in_unit_range(&out.payment));
    }

    #[test]
    fn two_five_payments_stay_in_range(inst in instance(4), seed in any::<u64>(), coin in any::<u64>()) {
        let proto = two_five_wrap(make_fig_scoring(inst));
        let coins: Vec<u64> = Protocol::<Rational>::coin_radices(&proto)
            .iter()
            .scan(coin, |c, &radix| {
                let v = *c % radix;
                *c /= radix;
                Some(v)
            })
            .collect();
        let out = run_protocol::<Rational, _>(&proto, &coins, &garbage(seed)).unwrap();
        prop_assert!(in_unit_range(&out.payment));
    }

    #[test]
    fn grouped_agrees_with_per_coin(inst in instance(4)) {
        let scoring = make_fig_scoring(inst.clone());
        for p in CommittedOracleProfile::family(&inst) {
            let g: Rational = expected_utility_with(&scoring, p.as_ref(), Evaluation::Grouped).unwrap();
            let c: Rational = expected_utility_with(&scoring, p.as_ref(), Evaluation::PerCoin).unwrap();
            prop_assert_eq!(g, c);
        }
        let simple = make_fig_simple(inst.clone(), MipVariant::Exhaustive);
        for p in SimpleProfile::family(&inst) {
            let g: Rational = expected_utility_with(&simple, p.as_ref(), Evaluation::Grouped).unwrap();
            let c: Rational = expected_utility_with(&simple, p.as_ref(), Evaluation::PerCoin).unwrap();
            prop_assert_eq!(g, c);
        }
    }

    #[test]
    fn complement_is_a_bijection_on_utilities(inst in instance(4)) {
        let base = make_fig_scoring(inst.clone());
        let wrapped = complement_wrap(base.clone());
        for p in CommittedOracleProfile::family(&inst) {
            let q: Profile = Arc::new(ComplementProfile::new(p.clone()));
            prop_assert_eq!(answer_bit(q.as_ref()), !answer_bit(p.as_ref()));
            let u: Rational = expected_utility_with(&base, p.as_ref(), Evaluation::PerCoin).unwrap();
            let v: Rational = expected_utility_with(&wrapped, q.as_ref(), Evaluation::PerCoin).unwrap();
            prop_assert_eq!(u, v);
        }
    }

    #[test]
    fn truthful_report_is_strictly_best(q in 0..=32i64, p in 0..=32i64) {
        let truth = BinaryDistribution::new(Rational::from_ratio(q, 32)).unwrap();
        let report = BinaryDistribution::new(Rational::from_ratio(p, 32)).unwrap();
        let honest = expected_protocol_score(&truth, &truth);
        let other = expected_protocol_score(&report, &truth);
        if p == q {
            prop_assert_eq!(honest, other);
        } else {
            prop_assert!(honest > other);
        }
    }
}
