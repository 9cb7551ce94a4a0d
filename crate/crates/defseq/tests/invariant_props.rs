//! Property tests: canonical sequence arithmetic and the invariant
//! homomorphisms, checked against naive evaluators and explicit expansion.

use defseq::{
    antoine_from_target, component_counts, disjoint_union, distinguish, expand,
    mod2_linking_sequence, nu, EpSeq, ExpandOptions, FormalClass, ParitySeq, Verdict, Z2,
};
use num_bigint::BigUint;
use proptest::prelude::*;

/// Direct lookup into the raw (preperiod, period) presentation.
fn naive(pre: &[Z2], per: &[Z2], i: usize) -> Z2 {
    if i < pre.len() {
        pre[i]
    } else {
        per[(i - pre.len()) % per.len()]
    }
}

fn bits(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<Z2>> {
    prop::collection::vec(any::<bool>(), len).prop_map(|bs| bs.into_iter().map(Z2::from).collect())
}

/// A legal realization target: eventually periodic with value 0 at index 0.
fn targets() -> impl Strategy<Value = ParitySeq> {
    (bits(0..=3), bits(1..=6)).prop_map(|(pre, per)| {
        let mut full = vec![Z2::ZERO];
        full.extend(pre);
        EpSeq::new(full, per)
    })
}

proptest! {
    #[test]
    fn canonical_form_preserves_values(pre in bits(0..=6), per in bits(1..=6)) {
        let s = EpSeq::new(pre.clone(), per.clone());
        for i in 0..pre.len() + 3 * per.len() + 4 {
            prop_assert_eq!(*s.value_at(i), naive(&pre, &per, i), "index {}", i);
        }
    }

    #[test]
    fn canonical_form_is_minimal(pre in bits(0..=6), per in bits(1..=6)) {
        let s = EpSeq::new(pre, per);
        let (p, q) = (s.preperiod(), s.period());
        // Primitive period: no proper divisor of |q| also generates q.
        for d in 1..q.len() {
            if q.len() % d == 0 {
                prop_assert!((0..q.len()).any(|i| q[i] != q[i % d]), "divisor {}", d);
            }
        }
        // Minimal preperiod: the last entry cannot fold into the cycle.
        if let Some(last) = p.last() {
            prop_assert_ne!(*last, *q.last().expect("period is nonempty"));
        }
    }

    #[test]
    fn canonical_form_ignores_presentation(
        pre in bits(0..=4),
        per in bits(1..=5),
        shift in 0usize..8,
        repeat in 1usize..4,
    ) {
        // Push `shift` leading period values into the preperiod, then unroll
        // the rotated period `repeat` times: same sequence, other spelling.
        let mut pre2 = pre.clone();
        pre2.extend((0..shift).map(|i| per[i % per.len()]));
        let rot: Vec<Z2> =
            (0..per.len()).map(|i| per[(i + shift) % per.len()]).collect();
        let per2: Vec<Z2> = rot.iter().copied().cycle().take(rot.len() * repeat).collect();
        prop_assert_eq!(EpSeq::new(pre, per), EpSeq::new(pre2, per2));
    }

    #[test]
    fn xor_is_an_involutive_abelian_operation(
        a in targets(), b in targets(), c in targets()
    ) {
        prop_assert_eq!(a.xor(&b), b.xor(&a));
        prop_assert_eq!(a.xor(&b).xor(&c), a.xor(&b.xor(&c)));
        prop_assert_eq!(a.xor(&a), ParitySeq::zero());
        prop_assert_eq!(a.xor(&ParitySeq::zero()), a);
    }

    #[test]
    fn spec_strings_round_trip(pre in bits(0..=6), per in bits(1..=6)) {
        let s: ParitySeq = EpSeq::new(pre, per);
        let text = s.spec_string();
        prop_assert_eq!(ParitySeq::parse_spec(&text).unwrap(), s, "spec {}", text);
    }
}

proptest! {
    // Expansion-backed properties materialize hundreds of nodes per case.
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn realization_round_trips(l in targets()) {
        let g = antoine_from_target(&l).unwrap();
        prop_assert_eq!(mod2_linking_sequence(&g.system).unwrap(), l);
    }

    #[test]
    fn union_adds_counts_and_xors_linking(a in targets(), b in targets()) {
        let ga = antoine_from_target(&a).unwrap().system;
        let gb = antoine_from_target(&b).unwrap().system;
        let u = disjoint_union(&ga, &gb).unwrap();

        let (ca, cb, cu) =
            (component_counts(&ga).unwrap(), component_counts(&gb).unwrap(),
             component_counts(&u).unwrap());
        let sums: Vec<BigUint> = ca
            .values(14)
            .into_iter()
            .zip(cb.values(14))
            .map(|(x, y)| x + y)
            .collect();
        prop_assert_eq!(cu.values(14), sums);

        let lu = mod2_linking_sequence(&u).unwrap();
        prop_assert_eq!(lu, a.xor(&b));
    }

    #[test]
    fn nu_ignores_representative_order(a in targets(), b in targets()) {
        let ga = antoine_from_target(&a).unwrap().system;
        let gb = antoine_from_target(&b).unwrap().system;
        let fwd = FormalClass {
            representatives: vec![ga.clone(), gb.clone()],
            slice_certificates: vec![],
        };
        let rev = FormalClass { representatives: vec![gb, ga], slice_certificates: vec![] };
        let n = nu(&fwd).unwrap();
        prop_assert_eq!(&n, &nu(&rev).unwrap());
        prop_assert_eq!(n, a.xor(&b));
    }

    #[test]
    fn distinguish_separates_distinct_targets(a in targets(), b in targets()) {
        let ca = FormalClass::of(antoine_from_target(&a).unwrap().system);
        let cb = FormalClass::of(antoine_from_target(&b).unwrap().system);
        let verdict = distinguish(&ca, &cb).unwrap();
        if a == b {
            prop_assert_eq!(verdict, Verdict::Unknown);
        } else {
            let witness = a.first_difference(&b).expect("distinct targets differ somewhere");
            prop_assert_eq!(verdict, Verdict::DistinctByNu { witness });
        }
    }

    #[test]
    fn descriptor_matches_enumeration_to_depth_five(l in targets()) {
        let ps = antoine_from_target(&l).unwrap().system;
        let counts = component_counts(&ps).unwrap();
        let stages = expand(&ps, 5, ExpandOptions::default()).unwrap();
        let sizes: Vec<BigUint> =
            stages.iter().map(|s| BigUint::from(s.nodes.len())).collect();
        prop_assert_eq!(counts.values(6), sizes);
    }
}
